#include "glorenz/map_model.hpp"

#include <algorithm>
#include <cmath>

#include "glorenz/errors.hpp"

namespace glorenz {

double IntervalQ::distance_to_zero() const {
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return std::min(std::abs(lo), std::abs(hi));
}

MapModel MapModel::symmetric(double alpha, double theta) {
  MapModel m;
  m.alpha = alpha;
  m.theta_left = theta;
  m.theta_right = theta;
  return m;
}

double MapModel::right(double x) const { return theta_right * std::pow(x, alpha) + offset_right; }

double MapModel::left(double x) const { return offset_left - theta_left * std::pow(-x, alpha); }

double MapModel::right_inverse(double y) const {
  const double u = (y - offset_right) / theta_right;
  return u <= 0.0 ? 0.0 : std::pow(u, 1.0 / alpha);
}

double MapModel::left_inverse(double y) const {
  const double u = (offset_left - y) / theta_left;
  return u <= 0.0 ? 0.0 : -std::pow(u, 1.0 / alpha);
}

double MapModel::eval(double x) const {
  if (x == 0.0) throw Error(ErrorKind::SingularLeaf, "f is undefined at x = 0");
  return x > 0.0 ? right(x) : left(x);
}

double MapModel::eval_side(double x, bool positive) const { return positive ? right(x) : left(x); }

double MapModel::deriv(double x) const {
  if (x == 0.0) throw Error(ErrorKind::SingularLeaf, "f' is unbounded at x = 0");
  return deriv_side(x, x > 0.0);
}

double MapModel::deriv_side(double x, bool positive) const {
  const double theta = positive ? theta_right : theta_left;
  return theta * alpha * std::pow(std::abs(x), alpha - 1.0);
}

double MapModel::second_deriv(double x) const {
  if (x == 0.0) throw Error(ErrorKind::SingularLeaf, "f'' is unbounded at x = 0");
  // d/dx of theta*alpha*|x|^(alpha-1) carries sgn(x).
  const double theta = x > 0.0 ? theta_right : theta_left;
  const double mag = theta * alpha * (1.0 - alpha) * std::pow(std::abs(x), alpha - 2.0);
  return x > 0.0 ? -mag : mag;
}

IntervalQ MapModel::image(const IntervalQ& j) const {
  if (j.straddles_zero()) throw Error(ErrorKind::Domain, "image of an interval containing 0");
  const bool pos = j.positive_side() && j.hi > 0.0;
  return {eval_side(j.lo, pos), eval_side(j.hi, pos)};
}

double f_eval(const MapModel& m, double x) { return m.eval(x); }
double f_deriv(const MapModel& m, double x) { return m.deriv(x); }

}  // namespace glorenz
