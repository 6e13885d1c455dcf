// One line per acceptance criterion. Exit status is nonzero when a criterion
// fails, unless it was named with --expect-fail (a documented shortfall);
// the line still reads FAIL in that case.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "glorenz/cantor.hpp"
#include "glorenz/errors.hpp"
#include "glorenz/fractal_dim.hpp"
#include "glorenz/geo_model.hpp"
#include "glorenz/one_d.hpp"
#include "glorenz/spectra_cf.hpp"
#include "glorenz/spectra_dyn.hpp"
#include "glorenz/ulam.hpp"

using namespace glorenz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MapModel cut_model() {
  MapModel m = map_model(GeoParams{});
  m.cut = choose_aleo_a(m, 0.005);
  return m;
}

Outcome attractor_box_dimension() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = ode_orbit(OdeParams{}, {1.0, 1.0, 1.0}, 0.005, 1000000, 10000);
  const auto series = box_dimension(to_cloud(pts), attractor_scales());
  const double t = seconds_since(t0);
  const bool ok = series.slope >= 1.96 && series.slope <= 2.16 && t <= 300.0;
  return {ok, fmt("slope %.4f over scales %.3g..%.3g (target [1.96, 2.16]), %zu points, %.1f s", series.slope,
                  series.scales[series.fit_lo], series.scales[series.fit_hi - 1], pts.size(), t)};
}

Outcome markov_head() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto h = enumerate_head(4, 2);
  const double t = seconds_since(t0);
  const double want[3] = {std::sqrt(5.0), 2.0 * std::sqrt(2.0), std::sqrt(221.0) / 5.0};
  bool ok = h.size() >= 3 && t <= 1.0;
  double worst = 0.0;
  for (int i = 0; ok && i < 3; ++i) worst = std::max(worst, std::abs(h[static_cast<std::size_t>(i)].value - want[i]));
  ok = ok && worst < 1e-9;
  return {ok, fmt("first three %.12f %.12f %.12f, max error %.1e, %.3f s", h.size() > 0 ? h[0].value : 0.0,
                  h.size() > 1 ? h[1].value : 0.0, h.size() > 2 ? h[2].value : 0.0, worst, t)};
}

Outcome hall_interval() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto h = hall_sum_check(1e-3);
  const double t = seconds_since(t0);
  const double r2 = std::sqrt(2.0) - 1.0;
  const bool target_ok = std::abs(h.target.lo - (r2 + 1e-3)) < 1e-15 && std::abs(h.target.hi - (4 * r2 - 1e-3)) < 1e-15;
  const bool ok = h.verified && h.max_gap == 0.0 && target_ok && t <= 30.0;
  return {ok, fmt("[%.6f, %.6f] covered gap-free=%s (max gap %.1e), %zu cylinders, %.2f s", h.target.lo, h.target.hi,
                  h.max_gap == 0.0 ? "yes" : "no", h.max_gap, h.cylinders, t)};
}

Outcome freiman() {
  const double v = freiman_constant();
  return {std::abs(v - 4.527829566) <= 1e-8, fmt("%.12f", v)};
}

Outcome moran_and_sandwich() {
  const double d = moran_solve({1.0 / 3.0, 1.0 / 3.0}, MoranMode::Contraction);
  const double err = std::abs(d - std::log(2.0) / std::log(3.0));
  bool ok = err < 1e-10;
  std::string detail = fmt("middle thirds error %.1e", err);
  const MapModel m = map_model(GeoParams{});
  for (double delta : {1e-2, 1e-3}) {
    const auto spec = build_direct_cantor(m, delta, 4);
    const auto b = d1_bounds(spec);
    const double box = cantor_box_dimension(m, spec, 6).slope;
    const bool in = box >= b.d_low - 0.05 && box <= b.d_up + 0.05;
    ok = ok && in;
    detail += fmt("; delta %.0e: box %.4f in [%.4f, %.4f]%s", delta, box, b.d_low - 0.05, b.d_up + 0.05, in ? "" : " NO");
  }
  return {ok, detail};
}

Outcome almost_leo_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const MapModel m = cut_model();
  const double cap = aleo_d_constant(m) * std::log(20.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lmin = std::log(1.0 / (3.0 * 20 * 20 * 20)), lmax = std::log(0.5);
  int bad[4] = {0, 0, 0, 0};
  int max_n = 0;
  for (int i = 0; i < 1000; ++i) {
    const double len = std::exp(lmin + u(rng) * (lmax - lmin));
    const double lo = -0.5 + u(rng) * (1.0 - len);
    const auto r = almost_leo(m, {lo, lo + len});
    bad[0] += r.n > r.n_bound;
    bad[1] += !r.terminal_matches(1e-9);
    bad[2] += !r.avoids_zero();
    bad[3] += r.n > cap;
    max_n = std::max(max_n, r.n);
  }
  const double t = seconds_since(t0);
  const bool ok = bad[0] + bad[1] + bad[2] + bad[3] == 0 && t <= 10.0;
  return {ok, fmt("1000 intervals: step bound %d, terminal image %d, avoid 0 %d, D log 20 (%.2f) %d violations; max n %d; %.2f s",
                  bad[0], bad[1], bad[2], cap, bad[3], max_n, t)};
}

struct TheoremFamily {
  std::vector<TheoremBuild> builds;
  MapModel m;
};

const TheoremFamily& theorem_family() {
  static const TheoremFamily fam = [] {
    TheoremFamily f;
    f.m = cut_model();
    const MeasureApprox mu = ulam_measure(f.m, 1024);
    TheoremOptions opts;
    opts.m_cap = 10;
    for (int k = 1; k <= 3; ++k) f.builds.push_back(build_theorem_cantor(f.m, mu, k, opts));
    return f;
  }();
  return fam;
}

Outcome distortion_suite() {
  const auto& fam = theorem_family();
  const double H = distortion_h(closed_form_constants(fam.m));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double lo = 1e300, hi = 0.0;
  long pairs = 0, outside = 0;
  const auto& spec = fam.builds.front().spec;
  for (const auto& b : spec.branches) {
    for (int i = 0; i < 100; ++i) {
      const double x = b.domain.lo + u(rng) * b.domain.length();
      const double y = b.domain.lo + u(rng) * b.domain.length();
      const double r = distortion_ratio(fam.m, b, x, y);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      outside += r < H || r > 1.0 / H;
      ++pairs;
    }
  }
  return {outside == 0 && pairs > 0, fmt("%zu branches, %ld pairs, ratios in [%.4f, %.4f], allowed [%.4f, %.4f], %ld outside",
                                          spec.branches.size(), pairs, lo, hi, H, 1.0 / H, outside)};
}

Outcome substituted_properties() {
  const auto& fam = theorem_family();
  const bool nested = nested_family(fam.builds[0].log, fam.builds[1].log) && nested_family(fam.builds[1].log, fam.builds[2].log);

  const MapModel m = map_model(GeoParams{});
  std::vector<double> dl;
  for (double delta : {1e-2, 1e-3, 1e-4}) dl.push_back(d1_bounds(build_direct_cantor(m, delta, 8)).d_low);
  const bool monotone = dl[0] <= dl[1] && dl[1] <= dl[2];

  DimBounds d;
  d.d_low = 0.9;
  const bool a = attractor_report(d, 0.2).certified_above_two;
  const bool b = !attractor_report(d, 0.05).certified_above_two;
  const bool c = !attractor_report(d, 0.2, true).certified_above_two;
  d.d_low = 0.6;
  const bool e = !attractor_report(d, 0.0).certified_above_two;
  const bool flags = a && b && c && e;
  return {nested && monotone && flags,
          fmt("(i) nested k=1,2,3: %s [%zu, %zu, %zu branches]; (ii) d_low %.4f <= %.4f <= %.4f: %s; (iii) report flags: %s",
              nested ? "yes" : "no", fam.builds[0].spec.branches.size(), fam.builds[1].spec.branches.size(),
              fam.builds[2].spec.branches.size(), dl[0], dl[1], dl[2], monotone ? "yes" : "no", flags ? "correct" : "wrong")};
}

Outcome spectra_consistency() {
  const GeoParams p;
  const auto map = poincare_map(p);
  const FlowFn F = flow_function("quad:0.1,0.5,-1,0.3,-0.8,0.2,-0.5,0.4,0.1,0.7");
  const SectionFn f = reduced_function(p, F, 64);
  SpectrumOptions o;
  o.seeds = 100;
  double worst = 0.0;
  for (int i = 0; i < o.seeds; ++i) {
    const auto z = draw_seed(map, o.rng_seed, i, o.burn_in);
    const auto dsc = orbit_functionals(map, f, z, o.horizon, o.tail_fraction);
    const auto flw = flow_orbit_functionals(p, F, z, o.horizon, o.tail_fraction);
    worst = std::max(worst, std::abs(dsc.m_value - flw.m_value));
  }
  const auto r1 = spectrum_sample(map, f, o);
  const auto r2 = spectrum_sample(map, f, o);
  long order_violations = 0;
  for (const auto& s : r1.samples) order_violations += s.l_value > s.m_value;
  const bool identical = r1.to_json() == r2.to_json() && r1.to_csv() == r2.to_csv();
  const bool ok = worst <= 1e-9 && order_violations == 0 && identical && r1.samples.size() == 100;
  return {ok, fmt("max |section - flow| %.1e over 100 seeds; l > m on %ld samples; rerun identical: %s", worst,
                  order_violations, identical ? "yes" : "no")};
}

Outcome ulam() {
  const MapModel m = map_model(GeoParams{});
  const auto a = ulam_measure(m, 1024);
  const auto b = ulam_measure(m, 2048);
  double total = 0.0;
  for (double v : a.masses) total += v;
  const double norm_err = std::abs(total - 1.0);
  const bool ok = norm_err <= 1e-12 && a.invariance_residual < 1e-3 && b.invariance_residual < a.invariance_residual;
  return {ok, fmt("mass error %.1e; residual %.3e at 1024, %.3e at 2048", norm_err, a.invariance_residual,
                  b.invariance_residual)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--expect-fail" || a == "--only") && i + 1 < argc) {
      (a == "--only" ? only : expect_fail).insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]... [--expect-fail N]...\n");
      return 2;
    }
  }
  const std::vector<std::function<Outcome()>> criteria{
      attractor_box_dimension, markov_head, hall_interval,          freiman,             moran_and_sandwich,
      almost_leo_suite,        distortion_suite, substituted_properties, spectra_consistency, ulam};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const char* note = (!o.pass && expect_fail.count(id)) ? " (documented shortfall)" : "";
    std::printf("criterion %2d: %s%s  %s\n", id, o.pass ? "PASS" : "FAIL", note, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !expect_fail.count(id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
