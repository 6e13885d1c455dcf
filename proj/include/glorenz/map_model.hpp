#pragma once

#include <optional>

namespace glorenz {

/// Closed subinterval [lo, hi] of I = [-1/2, 1/2]. An endpoint equal to 0 is
/// read as the one-sided limit from the side the interval lies on.
struct IntervalQ {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  // True when 0 is an interior point, i.e. the interval straddles the singularity.
  bool straddles_zero() const { return lo < 0.0 && hi > 0.0; }
  bool positive_side() const { return lo >= 0.0; }
  double distance_to_zero() const;
};

/// The one-dimensional Lorenz map
///   f(x) = theta_right * x^alpha + offset_right        for x > 0
///   f(x) = offset_left - theta_left * |x|^alpha        for x < 0
/// Both branches are increasing. The default instance is the symmetric map
/// f(x) = sgn(x) (1.65 |x|^0.75 - 1/2).
struct MapModel {
  double alpha = 0.75;
  double theta_left = 1.65;
  double theta_right = 1.65;
  double offset_left = 0.5;
  double offset_right = -0.5;
  // Cut parameter a of the almost-LEO construction; unset until chosen.
  std::optional<double> cut;

  static MapModel symmetric(double alpha, double theta);

  bool symmetric_branches() const {
    return theta_left == theta_right && offset_left == -offset_right;
  }

  // Branch formulas, valid on the closed half including 0 as a limit.
  double right(double x) const;
  double left(double x) const;
  double right_inverse(double y) const;
  double left_inverse(double y) const;

  double eval(double x) const;
  double deriv(double x) const;
  double second_deriv(double x) const;

  /// f on the branch selected by `positive`, so eval_side(0, true) = f(0+).
  double eval_side(double x, bool positive) const;
  double deriv_side(double x, bool positive) const;

  /// Image of an interval that does not straddle 0.
  IntervalQ image(const IntervalQ& j) const;
};

double f_eval(const MapModel& m, double x);
double f_deriv(const MapModel& m, double x);

}  // namespace glorenz
