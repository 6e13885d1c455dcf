#pragma once

#include <vector>

#include "glorenz/map_model.hpp"

namespace glorenz {

inline constexpr double kEndpointTol = 1e-9;
inline constexpr int kLeoIterationCap = 10000;

/// Zeros of f and their preimages. z{i}_{j} is the preimage of z{i} on the
/// left (j = 1) or right (j = 2) branch.
struct ZeroPreimages {
  double z1 = 0.0;  // f(z1) = 0, z1 < 0
  double z2 = 0.0;  // f(z2) = 0, z2 > 0
  double z1_1 = 0.0;
  double z1_2 = 0.0;
  double z2_1 = 0.0;
  double z2_2 = 0.0;
};

/// Root of a branch equation by bisection to 1e-12 or better.
ZeroPreimages zero_preimages(const MapModel& m);

double compute_kappa(const MapModel& m);

/// eta = inf f', and the constants C, C1 bounding f'/|x|^(alpha-1) and
/// |f''|/|x|^(alpha-2).
struct DistortionConstants {
  double eta = 0.0;
  double C = 0.0;
  double C1 = 0.0;
};

DistortionConstants closed_form_constants(const MapModel& m);
/// Same constants from log-spaced grid sampling with finite-difference
/// derivatives; independent of the power-law closed forms.
DistortionConstants estimated_constants(const MapModel& m, int grid_points = 2000);

/// H = exp(-(2/3) C C1 sqrt2 (sqrt2 + 1)), the two-sided distortion bound.
double distortion_h(const DistortionConstants& k);

struct MapCheck {
  bool f1 = false;           // one-sided limits at 0 equal +-1/2
  bool f2 = false;           // f' > sqrt2 everywhere on the grid
  bool f3 = false;           // f'(+-10^-k) strictly increasing, k = 3..10
  bool e3s2 = false;         // C and C1 bracket the grid ratios
  bool maps_into_i = false;  // f(I \ {0}) within I
  bool endpoints_moved = false;  // f(-1/2) != -1/2, f(1/2) != 1/2
  double min_deriv_on_grid = 0.0;
  DistortionConstants constants;

  bool ok() const { return f1 && f2 && f3 && e3s2 && maps_into_i && endpoints_moved; }
};

MapCheck verify_map_properties(const MapModel& m, int grid_points = 1000);

double choose_a(double eta, double kappa, double margin);
double choose_a(const MapModel& m, double margin);

/// Runtime test of the inequalities |f([-1/2, z1])| < |f([z1, a-1])| and
/// |f([z2, 1/2])| < |f([1-a, z2])| that fix which half the terminal step keeps.
struct R2Check {
  bool holds = false;
  double psi_left = 0.0;   // |f([z1, 0))| - |f([-1/2, z1])|
  double psi_right = 0.0;  // |f((0, z2])| - |f([z2, 1/2])|
  double left_margin = 0.0;
  double right_margin = 0.0;
};

R2Check r2_check(const MapModel& m, double a);
/// Smallest a for which r2_check holds and f(a-1) > z2.
double r2_threshold(const MapModel& m);
/// Cut parameter satisfying both the length constraints and r2_check.
double choose_aleo_a(const MapModel& m, double margin);

struct LeoRun {
  int n = 0;                         // first n with f^n(J) = I
  std::vector<IntervalQ> chain;      // J_0, J_1, ... of the halving recursion
  std::vector<bool> hits;            // 0 in f(J_i)
  bool growth_ok = true;             // |J_{i+2}| >= (eta^2/2)|J_i| off the terminal pairs
  int first_split = -1;              // first step whose image contains 0
};

LeoRun leo_iterate(const MapModel& m, const IntervalQ& j);

/// Locally-eventually-onto pullback used by the Cantor construction: a
/// subinterval of `j` mapped by f^n diffeomorphically onto `target` (a half
/// of I).
struct LeoPullback {
  IntervalQ domain;
  int n = 0;
};

LeoPullback leo_pullback(const MapModel& m, const IntervalQ& j, bool onto_left_half);

struct AleoResult {
  IntervalQ j_prime;
  int n = 0;
  int terminal_case = 0;              // 1 or 2
  std::vector<IntervalQ> chain;       // J_0 .. J_{n-1} of the cutting recursion
  std::vector<IntervalQ> step_images; // f^i(J'), i = 0..n
  std::vector<double> step_gaps;      // d(f^i(J'), 0), i = 0..n-1
  IntervalQ target;                   // L1^a = [f(1-a), 0)
  double a = 0.0;
  double n_bound = 0.0;               // 3 + log(1/(2|J|)) / log(a^2 eta^2 / 2)
  double input_length = 0.0;

  bool terminal_matches(double tol = kEndpointTol) const;
  bool avoids_zero() const;
  bool gap_bound_holds() const;
};

/// Almost-LEO: J' within J and n with f^n: J' -> L1^a a diffeomorphism whose
/// intermediate images avoid 0. Requires m.cut.
AleoResult almost_leo(const MapModel& m, const IntervalQ& j);

double aleo_n_bound(const MapModel& m, double length);
/// D = 5 / log(a^2 eta^2 / 2).
double aleo_d_constant(const MapModel& m);

struct RunDerivativeBound {
  double sup = 0.0;
  double bound = 0.0;  // E m^growth_exp
  double E = 0.0;
  double growth_exp = 0.0;
  bool holds() const { return sup <= bound; }
};

RunDerivativeBound derivative_sup_on_run(const MapModel& m, const AleoResult& res, int m_declared);

}  // namespace glorenz
