#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "glorenz/artifacts.hpp"
#include "glorenz/cantor.hpp"
#include "glorenz/errors.hpp"
#include "glorenz/fractal_dim.hpp"
#include "glorenz/geo_model.hpp"
#include "glorenz/one_d.hpp"
#include "glorenz/parallel.hpp"
#include "glorenz/spectra_cf.hpp"
#include "glorenz/spectra_dyn.hpp"
#include "glorenz/ulam.hpp"
#include "json.hpp"

namespace glorenz::cli {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// JSON config files: nested objects address subcommands, e.g.
// {"threads": 4, "cantor": {"theorem": {"k": 2}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static void flatten(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        flatten(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static ordered_json dump(const CLI::App* app, bool default_also) {
    ordered_json j = ordered_json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = CLI::detail::join(opt->results(), " ");
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      auto child = dump(sub, default_also);
      if (!child.empty()) j[sub->get_name()] = child;
    }
    return j;
  }
};

// Effective configuration of the selected subcommand chain, including
// defaults; values read from the config file are already folded in.
std::string config_fingerprint(CLI::App& app) {
  std::ostringstream os;
  for (CLI::App* a = &app; a != nullptr;) {
    os << '[' << a->get_name() << "]\n";
    for (const CLI::Option* opt : a->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      // Output locations and thread count do not change artifact content.
      if (name == "help" || name == "config" || name == "threads" || name == "out" || name == "csv" || name == "log") {
        continue;
      }
      os << name << '=';
      if (opt->count() > 0) {
        os << CLI::detail::join(opt->results(), ",");
      } else {
        os << opt->get_default_str();
      }
      os << '\n';
    }
    const auto subs = a->get_subcommands();
    a = subs.empty() ? nullptr : subs.front();
  }
  return os.str();
}

struct Globals {
  double model_alpha = 0.75;
  double model_theta = 1.65;
  std::uint64_t rng_seed = 1;
  unsigned threads = 0;
  std::string out;
};

struct Ctx {
  std::ostream& out;
  Globals g;
  std::string hash;

  GeoParams params() const {
    GeoParams p = GeoParams::from_eigenvalues(1.0, -3.75, -g.model_alpha, g.model_theta);
    const auto bad = validate_params(p);
    if (!bad.empty()) {
      std::string what = "model parameters violate:";
      for (auto v : bad) what += " " + to_string(v);
      throw Error(ErrorKind::ParameterConsistency, what);
    }
    return p;
  }
  MapModel model() const { return map_model(params()); }
};

std::string fixed(double v, int digits = 7) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// ---------------------------------------------------------------- ode / geo

struct OdeOpts {
  long steps = 1000000;
  double dt = 0.005;
  long transient = 10000;
  double a = 10.0, r = 28.0, b = 8.0 / 3.0;
  std::vector<double> x0{1.0, 1.0, 1.0};
};

void run_ode(Ctx& c, const OdeOpts& o) {
  if (o.x0.size() != 3) throw Error(ErrorKind::Configuration, "--x0 takes three values");
  const auto pts = ode_orbit(OdeParams{o.a, o.r, o.b}, {o.x0[0], o.x0[1], o.x0[2]}, o.dt, o.steps, o.transient);
  if (!c.g.out.empty()) {
    PlotSeries s{{"x", "y", "z"}, {}};
    s.values.reserve(pts.size() * 3);
    for (const auto& p : pts) s.add_row({p.x, p.y, p.z});
    emit_plot_data(s, c.g.out, c.hash);
  }
  c.out << "ode: " << pts.size() << " points" << (c.g.out.empty() ? "" : " -> " + c.g.out) << '\n';
}

struct GeoOpts {
  long points = 100000;
  long transient = 1000;
  double x0 = 0.3, y0 = 0.1;
};

void run_geo(Ctx& c, const GeoOpts& o) {
  const GeoParams p = c.params();
  const auto orbit = section_orbit(p, {o.x0, o.y0}, o.points, o.transient);
  if (!c.g.out.empty()) {
    PlotSeries s{{"x", "y"}, {}};
    for (const auto& q : orbit) s.add_row({q.x, q.y});
    emit_plot_data(s, c.g.out, c.hash);
  }
  c.out << "geo: parameters consistent (alpha=" << p.alpha << ", beta=" << p.beta << ", theta=" << p.theta << "), "
        << orbit.size() << " section points" << (c.g.out.empty() ? "" : " -> " + c.g.out) << '\n';
}

// ---------------------------------------------------------------- map-check

struct MapCheckOpts {
  double margin = 0.005;
  int bins = 1024;
  int aleo_samples = 200;
};

void run_map_check(Ctx& c, const MapCheckOpts& o) {
  MapModel m = c.model();
  const MapCheck chk = verify_map_properties(m);
  const auto z = zero_preimages(m);
  const double kappa = compute_kappa(m);
  const auto est = estimated_constants(m);
  const double H = distortion_h(chk.constants);
  const double a = choose_aleo_a(m, o.margin);
  m.cut = a;

  // Log-uniform lengths in [1/(3*20^3), 1/2]; the step bound is vacuous past 1/2.
  std::mt19937_64 rng(c.g.rng_seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lmin = std::log(1.0 / 24000.0), lmax = std::log(0.5);
  const double steps_cap = aleo_d_constant(m) * std::log(20.0);
  int aleo_ok = 0;
  for (int i = 0; i < o.aleo_samples; ++i) {
    const double len = std::exp(lmin + u(rng) * (lmax - lmin));
    const double lo = -0.5 + u(rng) * (1.0 - len);
    const auto r = almost_leo(m, {lo, lo + len});
    if (r.terminal_matches() && r.avoids_zero() && r.n <= r.n_bound && r.n <= steps_cap) ++aleo_ok;
  }
  const MeasureApprox mu = ulam_measure(m, o.bins);

  ordered_json j;
  j["properties"] = {{"one_sided_limits", chk.f1}, {"derivative_above_sqrt2", chk.f2},
                     {"derivative_monotone_near_0", chk.f3}, {"constants_bracket", chk.e3s2},
                     {"maps_into_interval", chk.maps_into_i}, {"endpoints_moved", chk.endpoints_moved}};
  j["constants"] = {{"eta", chk.constants.eta}, {"C", chk.constants.C}, {"C1", chk.constants.C1}, {"H", H},
                    {"eta_estimated", est.eta}, {"C_estimated", est.C}, {"C1_estimated", est.C1}};
  j["zeros"] = {{"z1", z.z1}, {"z2", z.z2}, {"z1_1", z.z1_1}, {"z1_2", z.z1_2}, {"z2_1", z.z2_1}, {"z2_2", z.z2_2}};
  j["kappa"] = kappa;
  j["cut"] = a;
  j["aleo"] = {{"samples", o.aleo_samples}, {"passed", aleo_ok}};
  j["measure"] = {{"bins", mu.bins},
                  {"stationarity_residual", mu.stationarity_residual},
                  {"invariance_residual", mu.invariance_residual},
                  {"density_sup", mu.density_sup}};
  if (!c.g.out.empty()) {
    PlotSeries s{{"bin_lo", "bin_hi", "mass"}, {}};
    for (int i = 0; i < mu.bins; ++i) s.add_row({mu.bin_lo(i), mu.bin_lo(i) + mu.bin_width(), mu.masses[static_cast<std::size_t>(i)]});
    emit_plot_data(s, c.g.out, c.hash);
  }
  c.out << j.dump(2) << '\n';
  c.out << "map-check: " << (chk.ok() ? "all map properties hold" : "map property FAILED") << ", aleo " << aleo_ok << '/'
        << o.aleo_samples << ", cut a=" << fixed(a) << ", ulam residual " << fixed(mu.invariance_residual, 3) << '\n';
  if (!chk.ok() || aleo_ok != o.aleo_samples) throw Error(ErrorKind::Domain, "map checks failed");
}

// ---------------------------------------------------------------- cantor

struct CantorOpts {
  int k = 1;
  int m_cap = 10;
  int budget = 256;
  int bins = 1024;
  std::string log;
  double delta = 1e-2;
  int depth = 8;
};

void report_spec(Ctx& c, const MapModel& m, const CantorSpec& spec, const std::string& label) {
  const MarkovCheck mk = check_markov(m, spec);
  if (!c.g.out.empty()) write_json_artifact(c.g.out, to_json(spec), c.hash);
  c.out << "cantor " << label << ": " << spec.branches.size() << " branches, markov "
        << (mk.ok() ? "ok" : "FAILED") << (c.g.out.empty() ? "" : " -> " + c.g.out) << '\n';
  if (!mk.ok()) throw Error(ErrorKind::Domain, "built spec fails the Markov check");
}

void run_cantor_theorem(Ctx& c, const CantorOpts& o) {
  MapModel m = c.model();
  const MeasureApprox mu = ulam_measure(m, o.bins);
  TheoremOptions opts;
  opts.m_cap = o.m_cap;
  opts.budget = o.budget;
  opts.seed = c.g.rng_seed;
  const auto build = build_theorem_cantor(m, mu, o.k, opts);
  m.cut = build.log.cut;
  if (!o.log.empty()) write_json_artifact(o.log, to_json(build.log), c.hash);
  report_spec(c, m, build.spec, "theorem k=" + std::to_string(o.k));
}

void run_cantor_direct(Ctx& c, const CantorOpts& o) {
  const MapModel m = c.model();
  report_spec(c, m, build_direct_cantor(m, o.delta, o.depth), "direct");
}

// ---------------------------------------------------------------- dim

struct DimOpts {
  std::string in;
  int scales = 12;
  double largest = 8.0;
  double decades = 1.5;
  int fit_lo = -1, fit_hi = -1;
  std::vector<double> values;
  std::string mode = "contraction";
  std::string spec;
  double delta = 1e-2;
  int depth = 4;
  int cyl_depth = 6;
};

void run_dim_box(Ctx& c, const DimOpts& o) {
  const PlotSeries data = read_csv(o.in);
  const std::size_t w = data.columns.size();
  if (w != 2 && w != 3) throw Error(ErrorKind::Configuration, "point cloud must have 2 or 3 columns");
  PointCloud cloud;
  cloud.dim = static_cast<int>(w);
  cloud.coords = data.values;
  const auto series = box_dimension(cloud, geometric_scales(o.largest, o.decades, o.scales), o.fit_lo, o.fit_hi);
  if (!c.g.out.empty()) {
    PlotSeries s{{"scale", "count"}, {}};
    for (std::size_t i = 0; i < series.scales.size(); ++i) s.add_row({series.scales[i], double(series.counts[i])});
    emit_plot_data(s, c.g.out, c.hash);
  }
  c.out << "dim box: " << cloud.size() << " points, slope " << fixed(series.slope, 4) << " (fit scales "
        << series.fit_lo << ".." << series.fit_hi - 1 << ", rms " << fixed(series.residual, 3) << ")\n";
}

void run_dim_moran(Ctx& c, const DimOpts& o) {
  MoranMode mode;
  if (o.mode == "contraction") {
    mode = MoranMode::Contraction;
  } else if (o.mode == "expansion") {
    mode = MoranMode::Expansion;
  } else {
    throw Error(ErrorKind::Configuration, "--mode must be contraction or expansion");
  }
  c.out << "dim moran: d = " << std::setprecision(12) << moran_solve(o.values, mode) << '\n';
}

CantorSpec load_or_build_spec(const MapModel& m, const std::string& path, double delta, int depth) {
  if (!path.empty()) return cantor_from_json(read_artifact(path));
  return build_direct_cantor(m, delta, depth);
}

void run_dim_cantor(Ctx& c, const DimOpts& o) {
  const MapModel m = c.model();
  const CantorSpec spec = load_or_build_spec(m, o.spec, o.delta, o.depth);
  const DimBounds d = d1_bounds(spec);
  // Keep the cylinder count within the enumeration budget.
  int depth = std::max(1, o.cyl_depth);
  while (depth > 1 && std::pow(double(spec.branches.size()), depth) > 4e6) --depth;
  const auto box = cantor_box_dimension(m, spec, depth);
  ordered_json j;
  j["d_low"] = d.d_low;
  j["d_up"] = d.d_up;
  j["method"] = d.method;
  j["box_slope"] = box.slope;
  j["cylinder_depth"] = depth;
  j["branches"] = spec.branches.size();
  if (!c.g.out.empty()) write_json_artifact(c.g.out, j.dump(), c.hash);
  c.out << "dim cantor: d_low " << fixed(d.d_low, 4) << ", d_up " << fixed(d.d_up, 4) << ", box " << fixed(box.slope, 4)
        << " (cylinder depth " << depth << ")\n";
}

// ---------------------------------------------------------------- spectra-dyn

struct DynOpts {
  std::string f = "x";
  std::string flow_f;
  int seeds = 1000;
  int horizon = 1000;
  double tail = 0.25;
  int burn_in = 50;
  double gap_factor = 5.0;
  bool lagrange = false;
  bool no_horizon_check = false;
  std::string csv;
  int quadrature = 64;
  long points = 5000;
  double grid = 1e-6;
};

void run_dyn_sample(Ctx& c, const DynOpts& o) {
  const GeoParams p = c.params();
  const SectionFn f = o.flow_f.empty() ? section_function(o.f) : reduced_function(p, flow_function(o.flow_f), o.quadrature);
  SpectrumOptions so;
  so.seeds = o.seeds;
  so.horizon = o.horizon;
  so.tail_fraction = o.tail;
  so.rng_seed = c.g.rng_seed;
  so.burn_in = o.burn_in;
  so.gap_factor = o.gap_factor;
  so.lagrange = o.lagrange;
  so.horizon_check = !o.no_horizon_check;
  const auto r = spectrum_sample(poincare_map(p), f, so);
  if (!c.g.out.empty()) write_json_artifact(c.g.out, r.to_json(), c.hash);
  if (!o.csv.empty()) write_text_artifact(o.csv, r.to_csv(), c.hash);
  c.out << "spectra-dyn " << r.variant << ": " << r.values.size() << " values in [" << fixed(r.values.front()) << ", "
        << fixed(r.values.back()) << "], " << r.candidates.size() << " candidate intervals, " << r.failures
        << " singular seeds, horizon-doubling change " << fixed(r.horizon_doubling_change, 3) << '\n';
}

void run_dyn_compare(Ctx& c, const DynOpts& o) {
  const GeoParams p = c.params();
  const FlowFn F = flow_function(o.flow_f.empty() ? "z" : o.flow_f);
  const SectionFn f = reduced_function(p, F, o.quadrature);
  const auto map = poincare_map(p);
  double worst = 0.0;
  for (int i = 0; i < o.seeds; ++i) {
    const auto z = draw_seed(map, c.g.rng_seed, i, o.burn_in);
    const auto d = orbit_functionals(map, f, z, o.horizon, o.tail);
    const auto fl = flow_orbit_functionals(p, F, z, o.horizon, o.tail);
    worst = std::max({worst, std::abs(d.m_value - fl.m_value), std::abs(d.l_value - fl.l_value)});
  }
  c.out << "spectra-dyn compare: " << o.seeds << " seeds, max |section - flow| = " << std::setprecision(3) << worst << '\n';
  if (worst > 1e-9) throw Error(ErrorKind::Domain, "section and flow spectra disagree");
}

void run_dyn_h1(Ctx& c, const DynOpts& o) {
  const GeoParams p = c.params();
  const auto orbit = section_orbit(p, {0.3, 0.1}, o.points, 100);
  const auto d = h1_membership(p, section_function(o.f), orbit, o.grid);
  c.out << "spectra-dyn h1: " << (d.member ? "member" : "not a member") << " (" << d.reason << "; max "
        << fixed(d.f_max) << " at (" << fixed(d.z.x) << ", " << fixed(d.z.y) << "), ties " << d.ties
        << ", |DP e_s| " << fixed(d.dp_stable, 3) << ", |DP e_u| " << fixed(d.dp_unstable, 3) << ")\n";
}

// ---------------------------------------------------------------- spectra-cf

struct CfOpts {
  int max_period = 4;
  int alphabet = 2;
  std::string word = "[;(2,2,1,1)]";
  double resolution = 1e-3;
};

void run_cf_head(Ctx& c, const CfOpts& o) {
  const auto h = enumerate_head(o.max_period, o.alphabet);
  if (!c.g.out.empty()) write_text_artifact(c.g.out, head_csv(h), c.hash);
  for (const auto& v : h) {
    const auto q = nearest_rational(v.value * v.value, 10000);
    c.out << std::setprecision(12) << v.value << "  sqrt(" << q.p << "/" << q.q << ")  " << v.witness.to_string() << '\n';
  }
  c.out << "spectra-cf head: " << h.size() << " values below 3\n";
}

void run_cf_k(Ctx& c, const CfOpts& o) {
  const CFWord w = CFWord::parse(o.word);
  const auto k = perron_k(w);
  c.out << "spectra-cf k: " << w.to_string() << " value " << std::setprecision(15) << cf_value(w) << ", k "
        << k.value << " at shift " << k.shift << '\n';
}

void run_cf_hall(Ctx& c, const CfOpts& o) {
  const auto h = hall_sum_check(o.resolution);
  if (!c.g.out.empty()) write_json_artifact(c.g.out, h.to_json(), c.hash);
  c.out << "spectra-cf hall: [" << fixed(h.target.lo) << ", " << fixed(h.target.hi) << "] "
        << (h.verified ? "covered" : "NOT covered") << ", max gap " << h.max_gap << ", " << h.cylinders
        << " cylinders (numerical covering, not a proof)\n";
  if (!h.verified) throw Error(ErrorKind::Domain, "covering check failed");
}

// ---------------------------------------------------------------- report

struct ReportOpts {
  std::string spec;
  double delta = 1e-2;
  int depth = 4;
  double stable = std::nan("");
  long points = 200000;
  double slab = 0.01;
};

void run_report(Ctx& c, const ReportOpts& o) {
  const GeoParams p = c.params();
  const MapModel m = map_model(p);
  const CantorSpec spec = load_or_build_spec(m, o.spec, o.delta, o.depth);
  const DimBounds d = d1_bounds(spec);
  double stable = o.stable;
  bool heuristic = false;
  if (std::isnan(stable)) {
    stable = stable_slab_estimate(section_orbit(p, {0.3, 0.1}, o.points, 1000), o.slab);
    heuristic = true;
  }
  const auto r = attractor_report(d, stable, heuristic);
  if (!c.g.out.empty()) write_json_artifact(c.g.out, r.to_json(), c.hash);
  c.out << r.to_json() << '\n';
  c.out << "report: flow bound " << fixed(r.flow_bound, 4) << (r.certified_above_two ? ", certified > 2" : ", not certified > 2")
        << (heuristic ? " (stable part heuristic)" : "") << '\n';
}

int exit_code_for(ErrorKind k) { return k == ErrorKind::Configuration ? 2 : 1; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric Lorenz attractor toolkit", "glorenz"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--model-alpha", g.model_alpha, "contraction exponent -lambda3/lambda1");
  app.add_option("--model-theta", g.model_theta, "branch gain of f");
  app.add_option("--rng-seed", g.rng_seed, "seed for every random stream");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--out", g.out, "primary output file");

  auto sub = [](CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  OdeOpts ode;
  auto* ode_cmd = sub(&app, "ode", "integrate the classical Lorenz system (RK4) and export the point cloud");
  ode_cmd->add_option("--steps", ode.steps)->check(CLI::PositiveNumber);
  ode_cmd->add_option("--dt", ode.dt)->check(CLI::PositiveNumber);
  ode_cmd->add_option("--transient", ode.transient)->check(CLI::NonNegativeNumber);
  ode_cmd->add_option("--a", ode.a);
  ode_cmd->add_option("--r", ode.r);
  ode_cmd->add_option("--b", ode.b);
  ode_cmd->add_option("--x0", ode.x0)->expected(3);

  GeoOpts geo;
  auto* geo_cmd = sub(&app, "geo", "validate model parameters and export a Poincare-map orbit");
  geo_cmd->add_option("--points", geo.points)->check(CLI::PositiveNumber);
  geo_cmd->add_option("--transient", geo.transient)->check(CLI::NonNegativeNumber);
  geo_cmd->add_option("--x0", geo.x0);
  geo_cmd->add_option("--y0", geo.y0);

  MapCheckOpts mc;
  auto* mc_cmd = sub(&app, "map-check", "check the one-dimensional map, constants, almost-LEO and invariant measure");
  mc_cmd->add_option("--margin", mc.margin)->check(CLI::PositiveNumber);
  mc_cmd->add_option("--bins", mc.bins);
  mc_cmd->add_option("--aleo-samples", mc.aleo_samples)->check(CLI::NonNegativeNumber);

  CantorOpts co;
  auto* cantor_cmd = sub(&app, "cantor", "build Cantor sets of the one-dimensional map");
  cantor_cmd->require_subcommand(1);
  auto* theorem_cmd = sub(cantor_cmd, "theorem", "measure-driven construction at level k");
  theorem_cmd->add_option("--k", co.k);
  theorem_cmd->add_option("--m-cap", co.m_cap);
  theorem_cmd->add_option("--budget", co.budget)->check(CLI::PositiveNumber);
  theorem_cmd->add_option("--bins", co.bins);
  theorem_cmd->add_option("--log", co.log, "run-log JSON output");
  auto* direct_cmd = sub(cantor_cmd, "direct", "direct pullback construction");
  direct_cmd->add_option("--delta", co.delta);
  direct_cmd->add_option("--depth", co.depth);

  DimOpts dim;
  auto* dim_cmd = sub(&app, "dim", "dimension estimates");
  dim_cmd->require_subcommand(1);
  auto* box_cmd = sub(dim_cmd, "box", "box-counting slope of a CSV point cloud");
  box_cmd->add_option("--in", dim.in)->required();
  box_cmd->add_option("--scales", dim.scales);
  box_cmd->add_option("--largest", dim.largest)->check(CLI::PositiveNumber);
  box_cmd->add_option("--decades", dim.decades)->check(CLI::PositiveNumber);
  box_cmd->add_option("--fit-lo", dim.fit_lo);
  box_cmd->add_option("--fit-hi", dim.fit_hi);
  auto* moran_cmd = sub(dim_cmd, "moran", "solve the Moran equation");
  moran_cmd->add_option("--values", dim.values)->required();
  moran_cmd->add_option("--mode", dim.mode);
  auto* dcantor_cmd = sub(dim_cmd, "cantor", "d1 bounds and box slope of a Cantor spec");
  dcantor_cmd->add_option("--spec", dim.spec, "spec JSON (default: direct build)");
  dcantor_cmd->add_option("--delta", dim.delta);
  dcantor_cmd->add_option("--depth", dim.depth);
  dcantor_cmd->add_option("--cyl-depth", dim.cyl_depth);

  DynOpts dyn;
  auto* dyn_cmd = sub(&app, "spectra-dyn", "dynamical Markov/Lagrange spectra");
  dyn_cmd->require_subcommand(1);
  auto* sample_cmd = sub(dyn_cmd, "sample", "sample the spectrum over random seeds");
  auto* compare_cmd = sub(dyn_cmd, "compare", "compare section and flow functionals on shared seeds");
  auto* h1_cmd = sub(dyn_cmd, "h1", "function-class membership at the sampled maximum");
  for (CLI::App* s : {sample_cmd, compare_cmd, h1_cmd}) s->add_option("--f", dyn.f, "section function");
  for (CLI::App* s : {sample_cmd, compare_cmd}) {
    s->add_option("--flow-f", dyn.flow_f, "flow function, reduced by maxF");
    s->add_option("--seeds", dyn.seeds);
    s->add_option("--horizon", dyn.horizon);
    s->add_option("--tail", dyn.tail);
    s->add_option("--burn-in", dyn.burn_in)->check(CLI::NonNegativeNumber);
    s->add_option("--quadrature", dyn.quadrature);
  }
  sample_cmd->add_option("--gap-factor", dyn.gap_factor)->check(CLI::PositiveNumber);
  sample_cmd->add_flag("--lagrange", dyn.lagrange);
  sample_cmd->add_flag("--no-horizon-check", dyn.no_horizon_check);
  sample_cmd->add_option("--csv", dyn.csv, "value,gap CSV output");
  h1_cmd->add_option("--points", dyn.points);
  h1_cmd->add_option("--grid", dyn.grid);

  CfOpts cf;
  auto* cf_cmd = sub(&app, "spectra-cf", "classical spectrum via continued fractions");
  cf_cmd->require_subcommand(1);
  auto* head_cmd = sub(cf_cmd, "head", "discrete head of the spectrum below 3");
  head_cmd->add_option("--max-period", cf.max_period);
  head_cmd->add_option("--alphabet", cf.alphabet);
  auto* k_cmd = sub(cf_cmd, "k", "Perron value of an eventually periodic word");
  k_cmd->add_option("--word", cf.word);
  auto* hall_cmd = sub(cf_cmd, "hall", "covering check of C(4) + C(4)");
  hall_cmd->add_option("--resolution", cf.resolution);
  auto* freiman_cmd = sub(cf_cmd, "freiman", "Freiman's constant");

  ReportOpts rep;
  auto* report_cmd = sub(&app, "report", "dimension report for the section and flow attractors");
  report_cmd->add_option("--spec", rep.spec);
  report_cmd->add_option("--delta", rep.delta);
  report_cmd->add_option("--depth", rep.depth);
  report_cmd->add_option("--stable", rep.stable, "certified lower bound for the stable direction");
  report_cmd->add_option("--points", rep.points);
  report_cmd->add_option("--slab", rep.slab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  set_worker_threads(g.threads);
  Ctx c{out, g, hex64(fnv1a64(config_fingerprint(app)))};
  try {
    if (ode_cmd->parsed()) run_ode(c, ode);
    else if (geo_cmd->parsed()) run_geo(c, geo);
    else if (mc_cmd->parsed()) run_map_check(c, mc);
    else if (theorem_cmd->parsed()) run_cantor_theorem(c, co);
    else if (direct_cmd->parsed()) run_cantor_direct(c, co);
    else if (box_cmd->parsed()) run_dim_box(c, dim);
    else if (moran_cmd->parsed()) run_dim_moran(c, dim);
    else if (dcantor_cmd->parsed()) run_dim_cantor(c, dim);
    else if (sample_cmd->parsed()) run_dyn_sample(c, dyn);
    else if (compare_cmd->parsed()) run_dyn_compare(c, dyn);
    else if (h1_cmd->parsed()) run_dyn_h1(c, dyn);
    else if (head_cmd->parsed()) run_cf_head(c, cf);
    else if (k_cmd->parsed()) run_cf_k(c, cf);
    else if (hall_cmd->parsed()) run_cf_hall(c, cf);
    else if (freiman_cmd->parsed()) out << "spectra-cf freiman: " << std::setprecision(15) << freiman_constant() << '\n';
    else if (report_cmd->parsed()) run_report(c, rep);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"glorenz"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace glorenz::cli
