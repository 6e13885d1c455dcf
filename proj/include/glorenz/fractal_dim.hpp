#pragma once

#include <map>
#include <string>
#include <vector>

#include "glorenz/cantor.hpp"
#include "glorenz/geo_model.hpp"

namespace glorenz {

enum class MoranMode { Contraction, Expansion };

/// Unique d >= 0 with sum r_i^d = 1 (contraction) or sum L_i^-d = 1
/// (expansion), by bisection to 1e-12.
double moran_solve(const std::vector<double>& values, MoranMode mode);

struct DimBounds {
  double d_low = 0.0;
  double d_up = 0.0;
  std::string method;
  std::map<std::string, double> metadata;
};

/// d_low from the per-branch sup derivatives, d_up from the inf derivatives.
DimBounds d1_bounds(const CantorSpec& spec);

/// Flat point cloud of fixed dimension.
struct PointCloud {
  int dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
  void add(const std::vector<double>& p) { coords.insert(coords.end(), p.begin(), p.end()); }
};

PointCloud to_cloud(const std::vector<Point3>& pts);
PointCloud to_cloud(const std::vector<SectionPoint>& pts);

struct BoxCountSeries {
  std::vector<double> scales;
  std::vector<long> counts;
  double slope = 0.0;
  double residual = 0.0;  // rms of the fit in log space
  int fit_lo = 0;         // fitted index window [fit_lo, fit_hi)
  int fit_hi = 0;

  std::string to_csv() const;
};

/// Fit window defaults to the middle half of the scale list.
BoxCountSeries box_dimension(const PointCloud& pts, const std::vector<double>& scales, int fit_lo = -1,
                             int fit_hi = -1);

/// n scales, geometric, from `largest` down by `decades` decades.
std::vector<double> geometric_scales(double largest, double decades, int n);

/// Scales used for the flow attractor: 12 geometric scales from 8.0 down 1.5 decades.
std::vector<double> attractor_scales();

/// Level-`depth` cylinders of the Cantor set: the base pulled back through
/// every word of branch inverses. Throws Resource past max_intervals.
std::vector<IntervalQ> cantor_cylinders(const MapModel& m, const CantorSpec& spec, int depth,
                                        std::size_t max_intervals = 4000000);

/// Box-count slope of the union of level-`depth` cylinders, counting every
/// box an interval meets.
BoxCountSeries cantor_box_dimension(const MapModel& m, const CantorSpec& spec, int depth);

struct AttractorReport {
  DimBounds d1;
  double stable_dim_low = 0.0;
  bool stable_heuristic = false;
  double section_bound = 0.0;  // HD of the section attractor, lower bound
  double flow_bound = 0.0;     // HD of the flow attractor, lower bound
  bool certified_above_two = false;

  std::string to_json() const;
};

AttractorReport attractor_report(const DimBounds& d1, double stable_dim_low, bool stable_heuristic = false);

/// 1D box-count slope of the y-coordinates of section points with
/// |x - center| <= slab_width / 2. Heuristic, never certified.
double stable_slab_estimate(const std::vector<SectionPoint>& pts, double slab_width, double center = 0.25);

}  // namespace glorenz
