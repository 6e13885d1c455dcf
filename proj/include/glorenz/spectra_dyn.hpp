#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "glorenz/geo_model.hpp"
#include "glorenz/map_model.hpp"

namespace glorenz {

using SectionFn = std::function<double(const SectionPoint&)>;
using FlowFn = std::function<double(const Point3&)>;
using SectionMap = std::function<SectionPoint(const SectionPoint&)>;

/// c + bx x + by y + axx x^2 + axy x y + ayy y^2
struct SectionQuadratic {
  double c = 0.0, bx = 0.0, by = 0.0, axx = 0.0, axy = 0.0, ayy = 0.0;
  double operator()(const SectionPoint& p) const;
};

/// c + b.p + p^T A p with A given by its six upper entries.
struct FlowQuadratic {
  double c = 0.0;
  std::array<double, 3> b{};
  double axx = 0.0, ayy = 0.0, azz = 0.0, axy = 0.0, axz = 0.0, ayz = 0.0;
  double operator()(const Point3& p) const;
};

/// Built-ins: "x", "y", "zero", "const:<c>", "quad:c,bx,by,axx,axy,ayy".
SectionFn section_function(const std::string& spec);
/// Built-ins: "x", "y", "z", "const:<c>", "quad:c,bx,by,bz,axx,ayy,azz,axy,axz,ayz".
FlowFn flow_function(const std::string& spec);

inline constexpr double kExteriorTransit = 1.0;
inline constexpr double kSingularTol = 1e-10;

SectionMap poincare_map(const GeoParams& p);

/// Time from x on the section back to the section: flight time through the
/// linear region plus the fixed exterior transit.
double return_time(const GeoParams& p, double x);
/// Flow position at time t in [0, return_time] after leaving section point s:
/// the linear flow up to the exit, then a straight exterior transit to P(s).
Point3 flow_point(const GeoParams& p, const SectionPoint& s, double t);

struct OrbitSpectrumSample {
  SectionPoint seed;
  double m_value = 0.0;
  double l_value = 0.0;
  int horizon = 0;
  int tail_start = 0;
};

OrbitSpectrumSample orbit_functionals(const SectionMap& map, const SectionFn& f, const SectionPoint& seed,
                                      int horizon, double tail_fraction);

/// Same functionals over the flow: sup of F over `horizon` section-to-section
/// segments, sampled on a global time grid and refined locally.
OrbitSpectrumSample flow_orbit_functionals(const GeoParams& p, const FlowFn& F, const SectionPoint& seed,
                                           int horizon, double tail_fraction, double time_step = 0.01);

/// max of F along the flow from x to P(x).
double max_f_reduction(const GeoParams& p, const FlowFn& F, const SectionPoint& x, int quadrature_steps);
SectionFn reduced_function(const GeoParams& p, const FlowFn& F, int quadrature_steps = 64);

struct SpectrumOptions {
  int seeds = 1000;
  int horizon = 1000;
  double tail_fraction = 0.25;
  std::uint64_t rng_seed = 1;
  int burn_in = 50;
  double gap_factor = 5.0;
  bool lagrange = false;  // report l-values instead of m-values
  bool horizon_check = true;
};

struct SpectrumReport {
  std::string variant;  // "markov" or "lagrange"
  std::vector<OrbitSpectrumSample> samples;  // per seed, in seed order
  std::vector<double> values;                // sorted
  std::vector<double> gaps;
  std::vector<IntervalQ> candidates;
  double threshold = 0.0;
  long failures = 0;
  long seeds = 0;
  double horizon_doubling_change = 0.0;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Seed i of a sampling run: uniform on the section, then `burn_in` map steps.
SectionPoint draw_seed(const SectionMap& map, std::uint64_t rng_seed, int index, int burn_in);

SpectrumReport spectrum_sample(const SectionMap& map, const SectionFn& f, const SpectrumOptions& opts);

/// Sorted values, gaps and maximal runs with gaps <= gap_factor * median
/// nearest-neighbour spacing.
SpectrumReport build_report(std::vector<double> values, double gap_factor);

struct H1Diagnostics {
  bool member = false;
  bool unique_max = false;
  long ties = 0;  // sample points at the maximum farther than grid from argmax
  std::size_t argmax = 0;
  SectionPoint z;
  double f_max = 0.0;
  std::array<double, 2> e_stable{};
  std::array<double, 2> e_unstable{};
  double dp_stable = 0.0;    // |DP_z e_s|
  double dp_unstable = 0.0;  // |DP_z e_u|
  double dfp_stable = 0.0;   // D(f o P)_z e_s
  double dfp_unstable = 0.0;
  std::string reason;
};

/// `orbit` is a consecutive orbit segment of P on the invariant set.
H1Diagnostics h1_membership(const GeoParams& p, const SectionFn& f, const std::vector<SectionPoint>& orbit,
                            double grid);

}  // namespace glorenz
