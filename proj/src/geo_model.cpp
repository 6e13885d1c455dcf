#include "glorenz/geo_model.hpp"

#include <cmath>

#include "glorenz/errors.hpp"

namespace glorenz {

namespace {

constexpr double kHalf = 0.5;
constexpr double kRatioTol = 1e-12;
constexpr double kBlowUp = 1e3;

double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

void require_section(double x) {
  if (x == 0.0) throw Error(ErrorKind::SingularLeaf, "x = 0 lies on the stable leaf of the origin");
  if (std::abs(x) > kHalf) throw Error(ErrorKind::Domain, "|x| > 1/2 is outside the section");
}

}  // namespace

GeoParams GeoParams::from_eigenvalues(double l1, double l2, double l3, double theta) {
  GeoParams p;
  p.lambda1 = l1;
  p.lambda2 = l2;
  p.lambda3 = l3;
  p.alpha = -l3 / l1;
  p.beta = -l2 / l1;
  p.theta = theta;
  return p;
}

std::string to_string(ParamViolation v) {
  switch (v) {
    case ParamViolation::Lambda3NotNegative: return "0 < -lambda3";
    case ParamViolation::Lambda3NotBelowLambda1: return "-lambda3 < lambda1";
    case ParamViolation::Lambda1NotBelowLambda2: return "lambda1 < -lambda2";
    case ParamViolation::AlphaMismatch: return "alpha = -lambda3/lambda1";
    case ParamViolation::BetaMismatch: return "beta = -lambda2/lambda1";
    case ParamViolation::ThetaNotPositive: return "theta > 0";
    case ParamViolation::FLeavesInterval: return "f(I \\ {0}) within I";
    case ParamViolation::FFixesEndpoint: return "f(-1/2) != -1/2 and f(1/2) != 1/2";
    case ParamViolation::GLeavesSection: return "g(I \\ {0}, I) within I";
  }
  return "unknown";
}

std::vector<ParamViolation> validate_params(const GeoParams& p) {
  std::vector<ParamViolation> out;
  if (!(-p.lambda3 > 0.0)) out.push_back(ParamViolation::Lambda3NotNegative);
  if (!(-p.lambda3 < p.lambda1)) out.push_back(ParamViolation::Lambda3NotBelowLambda1);
  if (!(p.lambda1 < -p.lambda2)) out.push_back(ParamViolation::Lambda1NotBelowLambda2);
  if (p.lambda1 != 0.0) {
    if (std::abs(p.alpha + p.lambda3 / p.lambda1) > kRatioTol) out.push_back(ParamViolation::AlphaMismatch);
    if (std::abs(p.beta + p.lambda2 / p.lambda1) > kRatioTol) out.push_back(ParamViolation::BetaMismatch);
  }
  if (!(p.theta > 0.0)) {
    out.push_back(ParamViolation::ThetaNotPositive);
    return out;
  }
  // Both branches are monotone, so the range of f is spanned by the limits at
  // 0 and the values at the endpoints of I.
  const MapModel m = map_model(p);
  const double at_lo = m.left(-kHalf);
  const double at_hi = m.right(kHalf);
  const double lims[] = {m.offset_left, m.offset_right, at_lo, at_hi};
  for (double v : lims) {
    if (!std::isfinite(v) || std::abs(v) > kHalf + 1e-15) {
      out.push_back(ParamViolation::FLeavesInterval);
      break;
    }
  }
  if (at_lo == -kHalf || at_hi == kHalf) out.push_back(ParamViolation::FFixesEndpoint);
  if (p.beta > 0.0) {
    const double reach = std::abs(p.g_gain) * kHalf * std::pow(kHalf, p.beta) + std::abs(p.g_offset);
    if (reach > kHalf) out.push_back(ParamViolation::GLeavesSection);
  }
  return out;
}

MapModel map_model(const GeoParams& p) {
  MapModel m;
  m.alpha = p.alpha;
  m.theta_left = p.theta;
  m.theta_right = p.theta;
  m.offset_left = p.offset_left;
  m.offset_right = p.offset_right;
  return m;
}

double flight_time(const GeoParams& p, double x0) {
  require_section(x0);
  return -std::log(std::abs(x0)) / p.lambda1;
}

Point3 l_map(const GeoParams& p, double x, double y) {
  require_section(x);
  const double ax = std::abs(x);
  return {sgn(x), y * std::pow(ax, p.beta), std::pow(ax, p.alpha)};
}

double g_eval(const GeoParams& p, double x, double y) {
  require_section(x);
  return p.g_gain * y * std::pow(std::abs(x), p.beta) + sgn(x) * p.g_offset;
}

SectionPoint poincare(const GeoParams& p, const SectionPoint& s) {
  require_section(s.x);
  if (std::abs(s.y) > kHalf) throw Error(ErrorKind::Domain, "|y| > 1/2 is outside the section");
  const MapModel m = map_model(p);
  const SectionPoint out{m.eval(s.x), g_eval(p, s.x, s.y)};
  if (std::abs(out.x) > kHalf || std::abs(out.y) > kHalf) {
    throw Error(ErrorKind::ParameterConsistency, "Poincare image leaves the section");
  }
  return out;
}

std::array<double, 4> poincare_jacobian(const GeoParams& p, const SectionPoint& s) {
  require_section(s.x);
  const MapModel m = map_model(p);
  const double ax = std::abs(s.x);
  const double dgdx = p.g_gain * s.y * p.beta * std::pow(ax, p.beta - 1.0) * sgn(s.x);
  return {m.deriv(s.x), 0.0, dgdx, p.g_gain * std::pow(ax, p.beta)};
}

std::vector<SectionPoint> section_orbit(const GeoParams& p, SectionPoint start, long n, long transient) {
  if (n < 1 || transient < 0) throw Error(ErrorKind::Configuration, "n >= 1 and transient >= 0 required");
  std::vector<SectionPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  SectionPoint s = start;
  for (long i = 0; i < transient + n; ++i) {
    s = poincare(p, s);
    if (i >= transient) out.push_back(s);
  }
  return out;
}

namespace {

Point3 lorenz_rhs(const OdeParams& p, const Point3& s) {
  return {p.a * (s.y - s.x), p.r * s.x - s.y - s.x * s.z, s.x * s.y - p.b * s.z};
}

Point3 axpy(const Point3& s, double h, const Point3& k) {
  return {s.x + h * k.x, s.y + h * k.y, s.z + h * k.z};
}

}  // namespace

std::vector<Point3> ode_orbit(const OdeParams& p, Point3 x0, double dt, long n_steps,
                              long transient) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Configuration, "dt must be positive");
  if (n_steps < 1 || transient < 0) throw Error(ErrorKind::Configuration, "n_steps >= 1 and transient >= 0 required");

  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(n_steps));
  Point3 s = x0;
  const long total = transient + n_steps;
  for (long i = 0; i < total; ++i) {
    const Point3 k1 = lorenz_rhs(p, s);
    const Point3 k2 = lorenz_rhs(p, axpy(s, 0.5 * dt, k1));
    const Point3 k3 = lorenz_rhs(p, axpy(s, 0.5 * dt, k2));
    const Point3 k4 = lorenz_rhs(p, axpy(s, dt, k3));
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    const double norm = std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
    if (!(norm <= kBlowUp)) {
      throw Error(ErrorKind::BlowUp, "state norm exceeded 1e3 at step " + std::to_string(i));
    }
    if (i >= transient) out.push_back(s);
  }
  return out;
}

}  // namespace glorenz
