#include "glorenz/spectra_dyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "glorenz/errors.hpp"
#include "glorenz/parallel.hpp"
#include "json.hpp"

namespace glorenz {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kRefineTol = 1e-11;
constexpr int kDirectionSteps = 20;

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Configuration, "bad coefficient '" + item + "'");
    }
  }
  return out;
}

// One section-to-section leg of the flow.
struct Segment {
  SectionPoint s;
  double tau = 0.0;
  Point3 exit;
  Point3 landing;
  double lambda1 = 1.0, lambda2 = -1.0, lambda3 = -1.0;

  Segment(const GeoParams& p, const SectionPoint& start) : s(start) {
    tau = flight_time(p, s.x);
    exit = l_map(p, s.x, s.y);
    const SectionPoint q = poincare(p, s);
    landing = {q.x, q.y, 1.0};
    lambda1 = p.lambda1;
    lambda2 = p.lambda2;
    lambda3 = p.lambda3;
  }

  double duration() const { return tau + kExteriorTransit; }

  Point3 at(double t) const {
    if (t <= tau) return {s.x * std::exp(lambda1 * t), s.y * std::exp(lambda2 * t), std::exp(lambda3 * t)};
    const double u = std::min(1.0, (t - tau) / kExteriorTransit);
    return {exit.x + u * (landing.x - exit.x), exit.y + u * (landing.y - exit.y), exit.z + u * (landing.z - exit.z)};
  }
};

// Max of a continuous function on [a, b]: endpoints, a uniform grid of n
// intervals, and golden-section refinement around every grid local maximum.
template <class Fn>
double sup_on_piece(const Fn& g, double a, double b, int n) {
  if (!(b > a)) return g(a);
  std::vector<double> t(static_cast<std::size_t>(n) + 1), v(t.size());
  for (int i = 0; i <= n; ++i) {
    t[static_cast<std::size_t>(i)] = i == n ? b : a + (b - a) * i / n;
    v[static_cast<std::size_t>(i)] = g(t[static_cast<std::size_t>(i)]);
  }
  double best = *std::max_element(v.begin(), v.end());
  for (int i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(v[k] >= v[k - 1] && v[k] >= v[k + 1])) continue;
    double lo = t[k - 1], hi = t[k + 1];
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    while (hi - lo > kRefineTol) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kGolden * (hi - lo);
        f2 = g(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kGolden * (hi - lo);
        f1 = g(x1);
      }
    }
    best = std::max({best, f1, f2, g(0.5 * (lo + hi))});
  }
  return best;
}

void require_off_leaf(const SectionPoint& z) {
  if (std::abs(z.x) < kSingularTol) throw Error(ErrorKind::SingularOrbit, "orbit reached the singular leaf");
}

std::array<double, 4> mul(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

std::array<double, 2> act(const std::array<double, 4>& a, const std::array<double, 2>& v) {
  return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
}

double norm(const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); }

std::array<double, 2> normalized(const std::array<double, 2>& v) {
  const double n = norm(v);
  return {v[0] / n, v[1] / n};
}

}  // namespace

double SectionQuadratic::operator()(const SectionPoint& p) const {
  return c + bx * p.x + by * p.y + axx * p.x * p.x + axy * p.x * p.y + ayy * p.y * p.y;
}

double FlowQuadratic::operator()(const Point3& p) const {
  return c + b[0] * p.x + b[1] * p.y + b[2] * p.z + axx * p.x * p.x + ayy * p.y * p.y + azz * p.z * p.z +
         axy * p.x * p.y + axz * p.x * p.z + ayz * p.y * p.z;
}

SectionFn section_function(const std::string& spec) {
  if (spec == "x") return [](const SectionPoint& p) { return p.x; };
  if (spec == "y") return [](const SectionPoint& p) { return p.y; };
  if (spec == "zero") return [](const SectionPoint&) { return 0.0; };
  if (spec.rfind("const:", 0) == 0) {
    const auto v = parse_numbers(spec.substr(6));
    if (v.size() != 1) throw Error(ErrorKind::Configuration, "const: takes one value");
    const double c = v[0];
    return [c](const SectionPoint&) { return c; };
  }
  if (spec.rfind("quad:", 0) == 0) {
    const auto v = parse_numbers(spec.substr(5));
    if (v.size() != 6) throw Error(ErrorKind::Configuration, "quad: takes c,bx,by,axx,axy,ayy");
    return SectionQuadratic{v[0], v[1], v[2], v[3], v[4], v[5]};
  }
  throw Error(ErrorKind::Configuration, "unknown section function '" + spec + "'");
}

FlowFn flow_function(const std::string& spec) {
  if (spec == "x") return [](const Point3& p) { return p.x; };
  if (spec == "y") return [](const Point3& p) { return p.y; };
  if (spec == "z") return [](const Point3& p) { return p.z; };
  if (spec.rfind("const:", 0) == 0) {
    const auto v = parse_numbers(spec.substr(6));
    if (v.size() != 1) throw Error(ErrorKind::Configuration, "const: takes one value");
    const double c = v[0];
    return [c](const Point3&) { return c; };
  }
  if (spec.rfind("quad:", 0) == 0) {
    const auto v = parse_numbers(spec.substr(5));
    if (v.size() != 10) throw Error(ErrorKind::Configuration, "quad: takes c,bx,by,bz,axx,ayy,azz,axy,axz,ayz");
    FlowQuadratic q;
    q.c = v[0];
    q.b = {v[1], v[2], v[3]};
    q.axx = v[4];
    q.ayy = v[5];
    q.azz = v[6];
    q.axy = v[7];
    q.axz = v[8];
    q.ayz = v[9];
    return q;
  }
  throw Error(ErrorKind::Configuration, "unknown flow function '" + spec + "'");
}

SectionMap poincare_map(const GeoParams& p) {
  return [p](const SectionPoint& s) { return poincare(p, s); };
}

double return_time(const GeoParams& p, double x) { return flight_time(p, x) + kExteriorTransit; }

Point3 flow_point(const GeoParams& p, const SectionPoint& s, double t) {
  const Segment seg(p, s);
  if (t < 0.0 || t > seg.duration()) throw Error(ErrorKind::Domain, "time outside the section-to-section leg");
  return seg.at(t);
}

OrbitSpectrumSample orbit_functionals(const SectionMap& map, const SectionFn& f, const SectionPoint& seed,
                                      int horizon, double tail_fraction) {
  if (horizon < 100) throw Error(ErrorKind::Configuration, "horizon must be at least 100");
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) throw Error(ErrorKind::Configuration, "tail_fraction must lie in (0, 1/2]");
  OrbitSpectrumSample out;
  out.seed = seed;
  out.horizon = horizon;
  out.tail_start = horizon - std::max(1, static_cast<int>(std::floor(tail_fraction * horizon)));
  out.m_value = out.l_value = -std::numeric_limits<double>::infinity();
  SectionPoint z = seed;
  for (int k = 0; k < horizon; ++k) {
    require_off_leaf(z);
    const double v = f(z);
    out.m_value = std::max(out.m_value, v);
    if (k >= out.tail_start) out.l_value = std::max(out.l_value, v);
    if (k + 1 < horizon) z = map(z);
  }
  return out;
}

OrbitSpectrumSample flow_orbit_functionals(const GeoParams& p, const FlowFn& F, const SectionPoint& seed,
                                           int horizon, double tail_fraction, double time_step) {
  if (horizon < 100) throw Error(ErrorKind::Configuration, "horizon must be at least 100");
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) throw Error(ErrorKind::Configuration, "tail_fraction must lie in (0, 1/2]");
  if (!(time_step > 0.0)) throw Error(ErrorKind::Configuration, "time_step must be positive");
  OrbitSpectrumSample out;
  out.seed = seed;
  out.horizon = horizon;
  out.tail_start = horizon - std::max(1, static_cast<int>(std::floor(tail_fraction * horizon)));

  std::vector<Segment> legs;
  std::vector<double> starts;
  double t = 0.0;
  SectionPoint z = seed;
  for (int k = 0; k < horizon; ++k) {
    require_off_leaf(z);
    legs.emplace_back(p, z);
    starts.push_back(t);
    t += legs.back().duration();
    z = {legs.back().landing.x, legs.back().landing.y};
  }
  const double total = t;
  const double tail_time = starts[static_cast<std::size_t>(out.tail_start)];

  // The orbit is smooth between section crossings and exits from the linear
  // region; sample each smooth piece on the global time grid.
  auto sup_between = [&](double from, double to) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < legs.size(); ++k) {
      const Segment& leg = legs[k];
      const double s0 = starts[k];
      const double cuts[3] = {s0, s0 + leg.tau, s0 + leg.duration()};
      for (int piece = 0; piece < 2; ++piece) {
        const double a = std::max(from, cuts[piece]);
        const double b = std::min(to, cuts[piece + 1]);
        if (b < a) continue;
        const int n = std::max(2, static_cast<int>(std::ceil((b - a) / time_step)));
        auto g = [&](double global) {
          const double local = piece == 0 ? std::min(global - s0, leg.tau) : std::max(global - s0, leg.tau);
          return F(leg.at(local));
        };
        best = std::max(best, sup_on_piece(g, a, b, n));
      }
    }
    return best;
  };
  out.m_value = sup_between(0.0, total);
  out.l_value = sup_between(tail_time, total);
  return out;
}

double max_f_reduction(const GeoParams& p, const FlowFn& F, const SectionPoint& x, int quadrature_steps) {
  if (quadrature_steps < 16) throw Error(ErrorKind::Configuration, "quadrature_steps must be at least 16");
  require_off_leaf(x);
  const Segment leg(p, x);
  auto g = [&](double t) { return F(leg.at(t)); };
  const double inside = sup_on_piece(g, 0.0, leg.tau, quadrature_steps);
  const double outside = sup_on_piece(g, leg.tau, leg.duration(), quadrature_steps);
  return std::max(inside, outside);
}

SectionFn reduced_function(const GeoParams& p, const FlowFn& F, int quadrature_steps) {
  if (quadrature_steps < 16) throw Error(ErrorKind::Configuration, "quadrature_steps must be at least 16");
  return [p, F, quadrature_steps](const SectionPoint& x) { return max_f_reduction(p, F, x, quadrature_steps); };
}

SectionPoint draw_seed(const SectionMap& map, std::uint64_t rng_seed, int index, int burn_in) {
  std::seed_seq seq{rng_seed, static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  SectionPoint z;
  do z.x = u(rng);
  while (std::abs(z.x) < kSingularTol);
  z.y = u(rng);
  for (int i = 0; i < burn_in; ++i) {
    require_off_leaf(z);
    z = map(z);
  }
  return z;
}

SpectrumReport build_report(std::vector<double> values, double gap_factor) {
  SpectrumReport r;
  std::sort(values.begin(), values.end());
  r.values = std::move(values);
  const std::size_t n = r.values.size();
  for (std::size_t i = 0; i + 1 < n; ++i) r.gaps.push_back(r.values[i + 1] - r.values[i]);
  if (n < 2) {
    if (n == 1) r.candidates.push_back({r.values[0], r.values[0]});
    return r;
  }
  std::vector<double> nn(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? r.gaps[i - 1] : std::numeric_limits<double>::infinity();
    const double right = i + 1 < n ? r.gaps[i] : std::numeric_limits<double>::infinity();
    nn[i] = std::min(left, right);
  }
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(n / 2), nn.end());
  r.threshold = gap_factor * nn[n / 2];
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 <= n; ++i) {
    const bool breaks = i + 1 == n || r.gaps[i] > r.threshold;
    if (breaks) {
      if (i > start) r.candidates.push_back({r.values[start], r.values[i]});
      start = i + 1;
    }
  }
  return r;
}

SpectrumReport spectrum_sample(const SectionMap& map, const SectionFn& f, const SpectrumOptions& opts) {
  if (opts.seeds < 100) throw Error(ErrorKind::Configuration, "at least 100 seeds required");
  const auto n = static_cast<std::size_t>(opts.seeds);
  std::vector<OrbitSpectrumSample> samples(n);
  std::vector<double> doubled(n, 0.0);
  std::vector<char> ok(n, 0);

  const unsigned hw = worker_threads();
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < hw; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += hw) {
        try {
          const SectionPoint z = draw_seed(map, opts.rng_seed, static_cast<int>(i), opts.burn_in);
          samples[i] = orbit_functionals(map, f, z, opts.horizon, opts.tail_fraction);
          if (opts.horizon_check) {
            const auto d = orbit_functionals(map, f, z, 2 * opts.horizon, opts.tail_fraction);
            doubled[i] = opts.lagrange ? std::abs(d.l_value - samples[i].l_value)
                                       : std::abs(d.m_value - samples[i].m_value);
          }
          ok[i] = 1;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::SingularOrbit && e.kind() != ErrorKind::SingularLeaf) throw;
        }
      }
    });
  }
  for (auto& w : workers) w.join();

  std::vector<double> values;
  std::vector<OrbitSpectrumSample> kept;
  double change = 0.0;
  long failures = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) {
      ++failures;
      continue;
    }
    kept.push_back(samples[i]);
    values.push_back(opts.lagrange ? samples[i].l_value : samples[i].m_value);
    change = std::max(change, doubled[i]);
  }
  if (2 * failures > opts.seeds) throw Error(ErrorKind::Sampling, "more than half of the seeds hit the singular leaf");
  SpectrumReport r = build_report(values, opts.gap_factor);
  r.variant = opts.lagrange ? "lagrange" : "markov";
  r.samples = std::move(kept);
  r.failures = failures;
  r.seeds = opts.seeds;
  r.horizon_doubling_change = change;
  return r;
}

std::string SpectrumReport::to_json() const {
  nlohmann::json j;
  j["variant"] = variant;
  j["seeds"] = seeds;
  j["failures"] = failures;
  j["threshold"] = threshold;
  j["horizon_doubling_change"] = horizon_doubling_change;
  j["values"] = values;
  j["gaps"] = gaps;
  nlohmann::json c = nlohmann::json::array();
  for (const auto& iv : candidates) c.push_back({iv.lo, iv.hi});
  j["candidate_intervals"] = c;
  j["note"] = "candidate intervals are gap-structure evidence, not a proof of interior";
  return j.dump(2);
}

std::string SpectrumReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "value,gap\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << values[i] << ',';
    if (i < gaps.size()) os << gaps[i];
    os << '\n';
  }
  return os.str();
}

H1Diagnostics h1_membership(const GeoParams& p, const SectionFn& f, const std::vector<SectionPoint>& orbit,
                            double grid) {
  if (orbit.size() < 1000) throw Error(ErrorKind::InsufficientData, "need at least 1e3 sample points");
  if (!(grid > 0.0)) throw Error(ErrorKind::Configuration, "grid must be positive");
  H1Diagnostics d;
  std::vector<double> vals(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) vals[i] = f(orbit[i]);
  d.argmax = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  d.z = orbit[d.argmax];
  d.f_max = vals[d.argmax];
  const double tie_tol = 1e-12 * std::max(1.0, std::abs(d.f_max));
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    if (vals[i] >= d.f_max - tie_tol && std::hypot(orbit[i].x - d.z.x, orbit[i].y - d.z.y) > grid) ++d.ties;
  }
  d.unique_max = d.ties == 0;

  // Stable direction: most contracted right singular vector of DP^20.
  std::array<double, 4> A{1.0, 0.0, 0.0, 1.0};
  SectionPoint w = d.z;
  for (int k = 0; k < kDirectionSteps; ++k) {
    require_off_leaf(w);
    A = mul(poincare_jacobian(p, w), A);
    const double s = std::max({std::abs(A[0]), std::abs(A[1]), std::abs(A[2]), std::abs(A[3])});
    for (double& a : A) a /= s;
    w = poincare(p, w);
  }
  const double m00 = A[0] * A[0] + A[2] * A[2];
  const double m01 = A[0] * A[1] + A[2] * A[3];
  const double m11 = A[1] * A[1] + A[3] * A[3];
  const double big = 0.5 * (m00 + m11) + std::sqrt(0.25 * (m00 - m11) * (m00 - m11) + m01 * m01);
  std::array<double, 2> v_big = std::abs(m01) > 0.0 ? std::array<double, 2>{m01, big - m00}
                                : (m00 >= m11 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0});
  v_big = normalized(v_big);
  d.e_stable = {-v_big[1], v_big[0]};

  // Unstable direction: push a horizontal vector along the preceding orbit.
  std::array<double, 2> u{1.0, 0.0};
  const std::size_t back = std::min<std::size_t>(kDirectionSteps, d.argmax);
  for (std::size_t k = d.argmax - back; k < d.argmax; ++k) u = normalized(act(poincare_jacobian(p, orbit[k]), u));
  d.e_unstable = u;

  const auto J = poincare_jacobian(p, d.z);
  const auto js = act(J, d.e_stable);
  const auto ju = act(J, d.e_unstable);
  d.dp_stable = norm(js);
  d.dp_unstable = norm(ju);
  const SectionPoint pz = poincare(p, d.z);
  const double h = 1e-6;
  const double gx = (f({pz.x + h, pz.y}) - f({pz.x - h, pz.y})) / (2.0 * h);
  const double gy = (f({pz.x, pz.y + h}) - f({pz.x, pz.y - h})) / (2.0 * h);
  d.dfp_stable = gx * js[0] + gy * js[1];
  d.dfp_unstable = gx * ju[0] + gy * ju[1];

  const bool transversal = d.dp_stable > 1e-8 && d.dp_unstable > 1e-8;
  d.member = d.unique_max && transversal;
  d.reason = !d.unique_max ? "maximum attained at several separated sample points"
             : !transversal ? "derivative along a stable/unstable direction vanishes"
                            : "unique maximizer with nondegenerate directions";
  return d;
}

}  // namespace glorenz
