#pragma once

#include <vector>

#include "glorenz/map_model.hpp"

namespace glorenz {

/// Piecewise-constant approximation of the absolutely continuous invariant
/// measure of f on I = [-1/2, 1/2].
struct MeasureApprox {
  int bins = 0;
  std::vector<double> masses;
  // ||v P - v||_1 for the bin-transfer matrix P.
  double stationarity_residual = 0.0;
  // ||T v - v||_1 where T pushes the piecewise-constant density forward under
  // the exact f; discretization error of the approximation.
  double invariance_residual = 0.0;
  // sup of the bin densities, used as the constant c with mu(J) <= c |J|.
  double density_sup = 0.0;
  int sweeps = 0;
  bool rigorous = false;

  double bin_width() const { return 1.0 / bins; }
  double bin_lo(int i) const { return -0.5 + i * bin_width(); }
  double density(int i) const { return masses[static_cast<std::size_t>(i)] / bin_width(); }

  /// mu([-1/2, x]).
  double cdf(double x) const;
  double mass(const IntervalQ& j) const { return cdf(j.hi) - cdf(j.lo); }
  /// x with cdf(x) = p, by bisection.
  double inverse_cdf(double p) const;
};

MeasureApprox ulam_measure(const MapModel& m, int bins);

/// L1 distance between the densities of two approximations on the finer grid.
double density_l1_distance(const MeasureApprox& a, const MeasureApprox& b);

/// ||T v - v||_1 for the exact push-forward T of f.
double exact_invariance_residual(const MapModel& m, const MeasureApprox& mu);

}  // namespace glorenz
