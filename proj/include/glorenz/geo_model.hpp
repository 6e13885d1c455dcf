#pragma once

#include <array>
#include <string>
#include <vector>

#include "glorenz/map_model.hpp"

namespace glorenz {

/// Parameters of the geometric Lorenz flow. alpha and beta are derived from
/// the eigenvalues of the linear region; use from_eigenvalues() to keep them
/// consistent.
struct GeoParams {
  double lambda1 = 1.0;
  double lambda2 = -3.75;
  double lambda3 = -0.75;
  double alpha = 0.75;
  double beta = 3.75;
  double theta = 1.65;
  // Branch constants of f: f(0-) = offset_left, f(0+) = offset_right.
  double offset_left = 0.5;
  double offset_right = -0.5;
  // g(x, y) = g_gain * y * |x|^beta + sgn(x) * g_offset
  double g_gain = 1.0;
  double g_offset = 0.25;

  static GeoParams from_eigenvalues(double l1, double l2, double l3, double theta = 1.65);
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct SectionPoint {
  double x = 0.0;
  double y = 0.0;
};

struct OdeParams {
  double a = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;
};

enum class ParamViolation {
  Lambda3NotNegative,        // 0 < -lambda3
  Lambda3NotBelowLambda1,    // -lambda3 < lambda1
  Lambda1NotBelowLambda2,    // lambda1 < -lambda2
  AlphaMismatch,             // stored alpha differs from -lambda3/lambda1
  BetaMismatch,              // stored beta differs from -lambda2/lambda1
  ThetaNotPositive,
  FLeavesInterval,           // f does not map I \ {0} into I
  FFixesEndpoint,            // f(-1/2) = -1/2 or f(1/2) = 1/2
  GLeavesSection,            // g image exceeds |y| <= 1/2
};

std::string to_string(ParamViolation v);

/// Every violated invariant; empty iff the parameters are valid.
std::vector<ParamViolation> validate_params(const GeoParams& p);

/// Quotient map of the Poincare map.
MapModel map_model(const GeoParams& p);

/// Time to reach |x| = 1 from (x0, y, 1) under the linear flow.
double flight_time(const GeoParams& p, double x0);

/// Exit point on {|x| = 1} of the linear flow started at (x, y, 1).
Point3 l_map(const GeoParams& p, double x, double y);

double g_eval(const GeoParams& p, double x, double y);

/// P(x, y) = (f(x), g(x, y)).
SectionPoint poincare(const GeoParams& p, const SectionPoint& s);

/// Jacobian of P at s, row-major {df/dx, df/dy, dg/dx, dg/dy}.
std::array<double, 4> poincare_jacobian(const GeoParams& p, const SectionPoint& s);

/// Orbit of the Poincare map, after discarding `transient` iterates.
std::vector<SectionPoint> section_orbit(const GeoParams& p, SectionPoint start, long n, long transient);

/// Fixed-step RK4 orbit of the classical Lorenz system; returns the n_steps
/// states that follow the first `transient` steps.
std::vector<Point3> ode_orbit(const OdeParams& p, Point3 x0, double dt, long n_steps,
                              long transient);

}  // namespace glorenz
