#include "glorenz/one_d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "glorenz/errors.hpp"

namespace glorenz {

namespace {

constexpr double kHalf = 0.5;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Bisection for an increasing function on [lo, hi]; returns x with g(x) ~ target.
double bisect_increasing(const std::function<double(double)>& g, double lo, double hi, double target) {
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double right_root(const MapModel& m, double target, const char* what) {
  // Right branch is increasing from offset_right (at 0+) to right(1/2).
  if (!(m.offset_right < target && target <= m.right(kHalf))) {
    throw Error(ErrorKind::ModelDegenerate, std::string("no right-branch preimage for ") + what);
  }
  return bisect_increasing([&](double x) { return m.right(x); }, 0.0, kHalf, target);
}

double left_root(const MapModel& m, double target, const char* what) {
  if (!(m.left(-kHalf) <= target && target < m.offset_left)) {
    throw Error(ErrorKind::ModelDegenerate, std::string("no left-branch preimage for ") + what);
  }
  return bisect_increasing([&](double x) { return m.left(x); }, -kHalf, 0.0, target);
}

std::vector<double> log_grid(int n, double lo_exp, double hi) {
  // n points from 10^lo_exp up to hi, logarithmically spaced.
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = lo_exp;
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return g;
}

double cut_parameter(const MapModel& m) {
  if (!m.cut) throw Error(ErrorKind::Configuration, "cut parameter a is not set");
  return *m.cut;
}

// J_a: drop the fraction (1 - a) of J on the side nearest 0.
IntervalQ cut_proportional(const IntervalQ& j, double a) {
  if (j.hi <= 0.0) return {j.lo, a * j.hi + (1.0 - a) * j.lo};
  return {a * j.lo + (1.0 - a) * j.hi, j.hi};
}

// aJ: drop the absolute length (1 - a) next to 0 from an interval touching 0.
IntervalQ cut_absolute(const IntervalQ& j, double a) {
  if (j.hi <= 0.0) return {j.lo, -(1.0 - a)};
  return {1.0 - a, j.hi};
}

// Bigger of the two parts 0 splits j into.
IntervalQ bigger_part(const IntervalQ& j) {
  return (-j.lo >= j.hi) ? IntervalQ{j.lo, 0.0} : IntervalQ{0.0, j.hi};
}

// Preimage of `k` under the branch of f that carries `domain`.
IntervalQ pull_back(const MapModel& m, const IntervalQ& domain, const IntervalQ& k) {
  const bool pos = domain.lo >= 0.0 && domain.hi > 0.0;
  if (pos) return {m.right_inverse(k.lo), m.right_inverse(k.hi)};
  return {m.left_inverse(k.lo), m.left_inverse(k.hi)};
}

bool is_left_half(const IntervalQ& j) { return j.lo <= -kHalf && j.hi == 0.0; }
bool is_right_half(const IntervalQ& j) { return j.lo == 0.0 && j.hi >= kHalf; }

// Image of a union of intervals, split at 0 and merged.
std::vector<IntervalQ> push_union(const MapModel& m, const std::vector<IntervalQ>& pieces) {
  std::vector<IntervalQ> out;
  out.reserve(pieces.size() * 2);
  for (const auto& p : pieces) {
    if (p.straddles_zero()) {
      out.push_back(m.image({p.lo, 0.0}));
      out.push_back(m.image({0.0, p.hi}));
    } else if (p.length() > 0.0) {
      out.push_back(m.image(p));
    }
  }
  std::vector<IntervalQ> split;
  split.reserve(out.size() * 2);
  for (const auto& p : out) {
    if (p.straddles_zero()) {
      split.push_back({p.lo, 0.0});
      split.push_back({0.0, p.hi});
    } else {
      split.push_back(p);
    }
  }
  std::sort(split.begin(), split.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
  std::vector<IntervalQ> merged;
  for (const auto& p : split) {
    if (!merged.empty() && p.lo <= merged.back().hi + 1e-15) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

}  // namespace

ZeroPreimages zero_preimages(const MapModel& m) {
  ZeroPreimages z;
  z.z1 = left_root(m, 0.0, "0 (z1)");
  z.z2 = right_root(m, 0.0, "0 (z2)");
  z.z1_1 = left_root(m, z.z1, "z1 (left)");
  z.z1_2 = right_root(m, z.z1, "z1 (right)");
  z.z2_1 = left_root(m, z.z2, "z2 (left)");
  z.z2_2 = right_root(m, z.z2, "z2 (right)");
  return z;
}

double compute_kappa(const MapModel& m) {
  const ZeroPreimages z = zero_preimages(m);
  const double lens[] = {z.z1 - z.z1_1, z.z2_1 - z.z1, z.z2 - z.z1_2, z.z2_2 - z.z2};
  const double kappa = *std::min_element(std::begin(lens), std::end(lens));
  if (!(kappa > 0.0)) throw Error(ErrorKind::ModelDegenerate, "zero-preimage intervals collapse");
  return kappa;
}

DistortionConstants closed_form_constants(const MapModel& m) {
  // f'(x) = theta alpha |x|^(alpha-1) on each branch, decreasing in |x|.
  DistortionConstants k;
  const double tl = m.theta_left * m.alpha;
  const double tr = m.theta_right * m.alpha;
  k.eta = std::min(tl, tr) * std::pow(kHalf, m.alpha - 1.0);
  k.C = std::max({tl, tr, 1.0 / tl, 1.0 / tr});
  k.C1 = std::max(tl, tr) * (1.0 - m.alpha);
  return k;
}

DistortionConstants estimated_constants(const MapModel& m, int grid_points) {
  DistortionConstants k;
  k.eta = std::numeric_limits<double>::infinity();
  const auto grid = log_grid(grid_points, -6.0, kHalf);
  for (double side : {-1.0, 1.0}) {
    for (double r : grid) {
      const double h = 1e-3 * r;
      const double fm = m.eval(side * (r - h));
      const double f0 = m.eval(side * r);
      const double fp = m.eval(side * (r + h));
      const double d1 = (fp - fm) / (side * 2.0 * h);
      const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
      const double scale1 = std::pow(r, m.alpha - 1.0);
      const double scale2 = std::pow(r, m.alpha - 2.0);
      k.eta = std::min(k.eta, d1);
      k.C = std::max({k.C, d1 / scale1, scale1 / d1});
      k.C1 = std::max(k.C1, std::abs(d2) / scale2);
    }
  }
  return k;
}

double distortion_h(const DistortionConstants& k) {
  return std::exp(-(2.0 / 3.0) * k.C * k.C1 * kSqrt2 * (kSqrt2 + 1.0));
}

MapCheck verify_map_properties(const MapModel& m, int grid_points) {
  MapCheck c;
  c.constants = closed_form_constants(m);
  c.f1 = std::abs(m.left(0.0) - kHalf) <= 1e-12 && std::abs(m.right(0.0) + kHalf) <= 1e-12;

  const auto grid = log_grid(grid_points, -12.0, kHalf);
  c.min_deriv_on_grid = std::numeric_limits<double>::infinity();
  c.e3s2 = true;
  for (double side : {-1.0, 1.0}) {
    for (double r : grid) {
      const double x = side * r;
      const double d = m.deriv(x);
      c.min_deriv_on_grid = std::min(c.min_deriv_on_grid, d);
      const double ratio = d / std::pow(r, m.alpha - 1.0);
      const double ratio2 = std::abs(m.second_deriv(x)) / std::pow(r, m.alpha - 2.0);
      const double slack = 1e-12;
      if (ratio < 1.0 / c.constants.C - slack || ratio > c.constants.C + slack || ratio2 > c.constants.C1 + slack) {
        c.e3s2 = false;
      }
    }
  }
  c.f2 = c.constants.eta > kSqrt2 && c.min_deriv_on_grid > kSqrt2;

  c.f3 = true;
  double prev_l = 0.0;
  double prev_r = 0.0;
  for (int k = 3; k <= 10; ++k) {
    const double x = std::pow(10.0, -k);
    const double dl = m.deriv(-x);
    const double dr = m.deriv(x);
    if (k > 3 && (dl <= prev_l || dr <= prev_r)) c.f3 = false;
    prev_l = dl;
    prev_r = dr;
  }

  const double vals[] = {m.left(-kHalf), m.left(0.0), m.right(0.0), m.right(kHalf)};
  c.maps_into_i = std::all_of(std::begin(vals), std::end(vals), [](double v) { return std::abs(v) <= kHalf + 1e-15; });
  c.endpoints_moved = m.left(-kHalf) != -kHalf && m.right(kHalf) != kHalf;
  return c;
}

double choose_a(double eta, double kappa, double margin) {
  if (!(eta > kSqrt2)) throw Error(ErrorKind::Infeasible, "eta <= sqrt2 leaves no a < 1 with a^2 eta^2 > 2");
  if (!(kappa > 0.0)) throw Error(ErrorKind::Infeasible, "kappa must be positive");
  if (!(margin > 0.0 && margin < 1.0)) throw Error(ErrorKind::Configuration, "margin must lie in (0, 1)");
  const double floor = std::max(kSqrt2 / eta, 1.0 - kappa);
  double a = floor + margin;
  if (a >= 1.0) a = 0.5 * (floor + 1.0);
  if (!(a * a * eta * eta > 2.0 && 1.0 - a < kappa && a < 1.0)) {
    throw Error(ErrorKind::Infeasible, "no feasible cut parameter");
  }
  return a;
}

double choose_a(const MapModel& m, double margin) {
  return choose_a(closed_form_constants(m).eta, compute_kappa(m), margin);
}

R2Check r2_check(const MapModel& m, double a) {
  R2Check r;
  const double f_lo = m.left(-kHalf);   // f(-1/2)
  const double f_hi = m.right(kHalf);   // f(1/2)
  // With f(z1) = 0: |f([z1, 0))| = offset_left and |f([-1/2, z1])| = -f(-1/2).
  r.psi_left = m.offset_left - (-f_lo);
  r.psi_right = -m.offset_right - f_hi;
  r.left_margin = m.left(a - 1.0) - (-f_lo);
  r.right_margin = -m.right(1.0 - a) - f_hi;
  r.holds = r.left_margin > 0.0 && r.right_margin > 0.0;
  return r;
}

double r2_threshold(const MapModel& m) {
  const ZeroPreimages z = zero_preimages(m);
  const double f_lo = m.left(-kHalf);
  const double f_hi = m.right(kHalf);
  const double a_left = 1.0 + m.left_inverse(-f_lo);
  const double a_right = 1.0 - m.right_inverse(-f_hi);
  // Case 2 of the terminal analysis needs f(a - 1) > z2.
  const double a_case2 = 1.0 + z.z2_1;
  return std::max({a_left, a_right, a_case2});
}

double choose_aleo_a(const MapModel& m, double margin) {
  const double base = choose_a(m, margin);
  const double thr = r2_threshold(m);
  if (base > thr && r2_check(m, base).holds) return base;
  return thr + 0.5 * (1.0 - thr);
}

LeoRun leo_iterate(const MapModel& m, const IntervalQ& j) {
  if (!(j.length() > 0.0)) throw Error(ErrorKind::Domain, "interval must have positive length");
  const double eta = closed_form_constants(m).eta;
  LeoRun run;
  run.chain.push_back(j.straddles_zero() ? bigger_part(j) : j);

  std::vector<IntervalQ> set{j};
  for (int i = 1; i <= kLeoIterationCap; ++i) {
    // Halving recursion of the proof.
    const IntervalQ fj = m.image(run.chain.back());
    const bool hit = fj.straddles_zero();
    run.hits.push_back(hit);
    if (hit && run.first_split < 0) run.first_split = i;
    run.chain.push_back(hit ? bigger_part(fj) : fj);

    set = push_union(m, set);
    if (set.size() > 100000) throw Error(ErrorKind::NonTermination, "image fragmented beyond budget");
    if (set.size() == 1 && set.front().lo <= -kHalf + kEndpointTol && set.front().hi >= kHalf - kEndpointTol) {
      run.n = i;
      break;
    }
  }
  if (run.n == 0) throw Error(ErrorKind::NonTermination, "leo_iterate exceeded the iteration cap");

  // hits[i] records 0 in f(J_i).
  for (std::size_t i = 0; i + 2 < run.chain.size(); ++i) {
    const bool terminal = run.hits[i] && run.hits[i + 1];
    if (terminal) continue;
    if (run.chain[i + 2].length() < 0.5 * eta * eta * run.chain[i].length() - 1e-12) run.growth_ok = false;
  }
  return run;
}

LeoPullback leo_pullback(const MapModel& m, const IntervalQ& j, bool onto_left_half) {
  if (!(j.length() > 0.0)) throw Error(ErrorKind::Domain, "interval must have positive length");
  std::vector<IntervalQ> chain{j.straddles_zero() ? bigger_part(j) : j};
  for (int i = 0; i < kLeoIterationCap; ++i) {
    const IntervalQ& cur = chain.back();
    const bool at_left = is_left_half(cur);
    const bool at_right = is_right_half(cur);
    if ((at_left && onto_left_half) || (at_right && !onto_left_half)) {
      IntervalQ dom = onto_left_half ? IntervalQ{-kHalf, 0.0} : IntervalQ{0.0, kHalf};
      for (std::size_t k = chain.size() - 1; k-- > 0;) dom = pull_back(m, chain[k], dom);
      return {dom, static_cast<int>(chain.size()) - 1};
    }
    if (at_left || at_right) {
      // The other half covers the requested one after one more step.
      const IntervalQ target = onto_left_half ? IntervalQ{-kHalf, 0.0} : IntervalQ{0.0, kHalf};
      IntervalQ dom = pull_back(m, cur, target);
      dom = {std::max(dom.lo, cur.lo), std::min(dom.hi, cur.hi)};
      for (std::size_t k = chain.size() - 1; k-- > 0;) dom = pull_back(m, chain[k], dom);
      return {dom, static_cast<int>(chain.size())};
    }
    const IntervalQ fj = m.image(cur);
    chain.push_back(fj.straddles_zero() ? bigger_part(fj) : fj);
  }
  throw Error(ErrorKind::NonTermination, "leo_pullback exceeded the iteration cap");
}

double aleo_n_bound(const MapModel& m, double length) {
  const double a = cut_parameter(m);
  const double eta = closed_form_constants(m).eta;
  return 3.0 + std::log(1.0 / (2.0 * length)) / std::log(a * a * eta * eta / 2.0);
}

double aleo_d_constant(const MapModel& m) {
  const double a = cut_parameter(m);
  const double eta = closed_form_constants(m).eta;
  return 5.0 / std::log(a * a * eta * eta / 2.0);
}

bool AleoResult::terminal_matches(double tol) const {
  const IntervalQ& img = step_images.back();
  return std::abs(img.lo - target.lo) <= tol && std::abs(img.hi - target.hi) <= tol;
}

bool AleoResult::avoids_zero() const {
  return std::all_of(step_gaps.begin(), step_gaps.end(), [](double g) { return g > 0.0; });
}

bool AleoResult::gap_bound_holds() const {
  for (std::size_t i = 2; i < step_gaps.size() && i - 2 < chain.size(); ++i) {
    if (step_gaps[i] < 0.5 * (1.0 - a) * chain[i - 2].length() - 1e-15) return false;
  }
  return true;
}

AleoResult almost_leo(const MapModel& m, const IntervalQ& j) {
  const double a = cut_parameter(m);
  if (!(j.length() > 0.0)) throw Error(ErrorKind::Domain, "interval must have positive length");
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::Configuration, "cut parameter must lie in (0, 1)");
  if (!r2_check(m, a).holds) {
    throw Error(ErrorKind::Configuration, "cut parameter fails the terminal-half inequality; raise a (see r2_threshold)");
  }
  const ZeroPreimages z = zero_preimages(m);

  AleoResult res;
  res.a = a;
  res.input_length = j.length();
  res.target = {m.right(1.0 - a), 0.0};
  res.n_bound = aleo_n_bound(m, j.length());

  std::vector<IntervalQ>& chain = res.chain;
  std::vector<IntervalQ> images;
  std::vector<bool> hits;
  chain.push_back(cut_proportional(j.straddles_zero() ? bigger_part(j) : j, a));

  int n = 0;
  for (int i = 0; i < kLeoIterationCap; ++i) {
    const IntervalQ fj = m.image(chain[static_cast<std::size_t>(i)]);
    const bool hit = fj.straddles_zero();
    images.push_back(fj);
    hits.push_back(hit);
    if (i >= 1 && hits[static_cast<std::size_t>(i - 1)] && hit) {
      n = i + 1;
      break;
    }
    chain.push_back(cut_proportional(hit ? bigger_part(fj) : fj, a));
  }
  if (n == 0) throw Error(ErrorKind::NonTermination, "almost_leo exceeded the iteration cap");

  const std::size_t k2 = static_cast<std::size_t>(n - 2);
  const IntervalQ big = bigger_part(images[k2]);
  if (!(big.length() > 1.0 - a)) {
    throw Error(ErrorKind::ConstructionFailed, "terminal half shorter than 1 - a");
  }
  const IntervalQ tilde = cut_absolute(big, a);
  const IntervalQ base_pre{1.0 - a, z.z2};  // f maps it onto L1^a

  // Pull the interval [1-a, z2] back to a subinterval of J_{n-2} (case 1) or
  // through the extra step in tilde (case 2), then down the chain.
  IntervalQ dom;
  std::size_t top = k2;
  if (tilde.lo >= 0.0) {
    if (!(tilde.contains(z.z2))) throw Error(ErrorKind::ConstructionFailed, "case 1: z2 not in the cut half");
    res.terminal_case = 1;
    res.n = n;
    dom = pull_back(m, chain[k2], base_pre);
  } else {
    if (!(tilde.contains(z.z1))) throw Error(ErrorKind::ConstructionFailed, "case 2: z1 not in the cut half");
    const double fa = m.left(a - 1.0);
    if (!(fa > z.z2)) throw Error(ErrorKind::ConstructionFailed, "case 2: f(a-1) <= z2");
    res.terminal_case = 2;
    res.n = n + 1;
    const IntervalQ in_tilde = pull_back(m, tilde, base_pre);
    dom = pull_back(m, chain[k2], in_tilde);
  }
  for (std::size_t k = top; k-- > 0;) dom = pull_back(m, chain[k], dom);
  res.j_prime = dom;
  chain.resize(static_cast<std::size_t>(n));

  res.step_images.push_back(dom);
  IntervalQ cur = dom;
  for (int i = 0; i < res.n; ++i) {
    res.step_gaps.push_back(cur.distance_to_zero());
    if (cur.straddles_zero()) break;
    cur = m.image(cur);
    res.step_images.push_back(cur);
  }
  return res;
}

RunDerivativeBound derivative_sup_on_run(const MapModel& m, const AleoResult& res, int m_declared) {
  RunDerivativeBound b;
  const DistortionConstants k = closed_form_constants(m);
  b.E = k.C * std::pow(1.0 - res.a, m.alpha - 1.0) * std::pow(6.0, 1.0 - m.alpha);
  b.growth_exp = 3.0 * (1.0 - m.alpha);
  b.bound = b.E * std::pow(static_cast<double>(m_declared), b.growth_exp);
  for (int i = 0; i < res.n; ++i) {
    const IntervalQ& img = res.step_images[static_cast<std::size_t>(i)];
    // |f'| peaks at the endpoint nearest 0.
    const double near = std::abs(img.lo) < std::abs(img.hi) ? img.lo : img.hi;
    if (near == 0.0) {
      b.sup = std::numeric_limits<double>::infinity();
      break;
    }
    b.sup = std::max(b.sup, m.deriv(near));
  }
  return b;
}

}  // namespace glorenz
