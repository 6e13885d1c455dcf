#include "glorenz/fractal_dim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "glorenz/errors.hpp"
#include "glorenz/parallel.hpp"
#include "json.hpp"

namespace glorenz {

namespace {

constexpr double kMoranTol = 1e-12;

double moran_sum(const std::vector<double>& v, MoranMode mode, double d) {
  double s = 0.0;
  for (double x : v) s += mode == MoranMode::Contraction ? std::pow(x, d) : std::pow(x, -d);
  return s;
}

struct Fit {
  double slope = 0.0;
  double rms = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + f.slope * (x[i] - mx));
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

void fit_series(BoxCountSeries& s, int fit_lo, int fit_hi) {
  const int n = static_cast<int>(s.scales.size());
  if (fit_lo < 0 || fit_hi < 0) {
    fit_lo = n / 4;
    fit_hi = n - n / 4;
  }
  if (fit_lo < 0 || fit_hi > n || fit_hi - fit_lo < 2) {
    throw Error(ErrorKind::Configuration, "fit window needs at least two scales inside the series");
  }
  s.fit_lo = fit_lo;
  s.fit_hi = fit_hi;
  std::vector<double> x, y;
  for (int i = fit_lo; i < fit_hi; ++i) {
    x.push_back(std::log(1.0 / s.scales[static_cast<std::size_t>(i)]));
    y.push_back(std::log(static_cast<double>(s.counts[static_cast<std::size_t>(i)])));
  }
  const Fit f = least_squares(x, y);
  s.slope = f.slope;
  s.residual = f.rms;
}

void check_scales(const std::vector<double>& scales) {
  if (scales.size() < 4) throw Error(ErrorKind::Configuration, "need at least 4 scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw Error(ErrorKind::Configuration, "scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1])) throw Error(ErrorKind::Configuration, "scales must be strictly decreasing");
  }
  if (std::log10(scales.front() / scales.back()) < 1.5 - 1e-12) {
    throw Error(ErrorKind::Configuration, "scales must span at least 1.5 decades");
  }
}

IntervalQ pull_back_branch(const MapModel& m, const CantorBranch& b, IntervalQ j) {
  for (int s = b.total_iterates - 1; s >= 0; --s) {
    if (b.sides[static_cast<std::size_t>(s)]) {
      j = {m.right_inverse(j.lo), m.right_inverse(j.hi)};
    } else {
      j = {m.left_inverse(j.lo), m.left_inverse(j.hi)};
    }
  }
  return j;
}

}  // namespace

double moran_solve(const std::vector<double>& values, MoranMode mode) {
  if (values.empty()) throw Error(ErrorKind::Domain, "Moran equation needs at least one value");
  for (double v : values) {
    const bool ok = mode == MoranMode::Contraction ? (v > 0.0 && v < 1.0) : (v > 1.0 && std::isfinite(v));
    if (!ok) throw Error(ErrorKind::Domain, "Moran value outside the admissible range");
  }
  // The sum is strictly decreasing in d and equals #values at d = 0.
  if (moran_sum(values, mode, 0.0) <= 1.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (moran_sum(values, mode, hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::Numeric, "Moran root not bracketed");
  }
  while (hi - lo > kMoranTol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (moran_sum(values, mode, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DimBounds d1_bounds(const CantorSpec& spec) {
  if (spec.branches.empty()) throw Error(ErrorKind::Domain, "CantorSpec has no branches");
  std::vector<double> sup, inf;
  for (const auto& b : spec.branches) {
    if (!(b.lambda_min > 1.0)) throw Error(ErrorKind::NotExpanding, "branch with lambda_min <= 1");
    sup.push_back(b.lambda_max);
    inf.push_back(b.lambda_min);
  }
  DimBounds d;
  d.method = "moran-sup";
  d.d_low = moran_solve(sup, MoranMode::Expansion);
  const double raw_up = moran_solve(inf, MoranMode::Expansion);
  d.d_up = std::min(raw_up, 1.0);
  d.metadata["branches"] = static_cast<double>(spec.branches.size());
  d.metadata["lambda_min_min"] = *std::min_element(inf.begin(), inf.end());
  d.metadata["lambda_max_max"] = *std::max_element(sup.begin(), sup.end());
  d.metadata["d_up_unclamped"] = raw_up;
  return d;
}

PointCloud to_cloud(const std::vector<Point3>& pts) {
  PointCloud c;
  c.dim = 3;
  c.coords.reserve(pts.size() * 3);
  for (const auto& p : pts) c.coords.insert(c.coords.end(), {p.x, p.y, p.z});
  return c;
}

PointCloud to_cloud(const std::vector<SectionPoint>& pts) {
  PointCloud c;
  c.dim = 2;
  c.coords.reserve(pts.size() * 2);
  for (const auto& p : pts) c.coords.insert(c.coords.end(), {p.x, p.y});
  return c;
}

std::string BoxCountSeries::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "scale,count\n";
  for (std::size_t i = 0; i < scales.size(); ++i) os << scales[i] << ',' << counts[i] << '\n';
  return os.str();
}

BoxCountSeries box_dimension(const PointCloud& pts, const std::vector<double>& scales, int fit_lo, int fit_hi) {
  if (pts.dim < 1 || pts.dim > 3) throw Error(ErrorKind::Configuration, "point dimension must be 1, 2 or 3");
  const std::size_t n = pts.size();
  if (pts.dim == 3 && n < 10000) throw Error(ErrorKind::InsufficientData, "3D clouds need at least 1e4 points");
  if (n < 2) throw Error(ErrorKind::InsufficientData, "need at least two points");
  check_scales(scales);
  const int dim = pts.dim;

  std::vector<double> lo(static_cast<std::size_t>(dim), std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(dim), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      const double v = pts.coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)];
      lo[static_cast<std::size_t>(d)] = std::min(lo[static_cast<std::size_t>(d)], v);
      hi[static_cast<std::size_t>(d)] = std::max(hi[static_cast<std::size_t>(d)], v);
    }
  }
  bool degenerate = true;
  for (int d = 0; d < dim; ++d) degenerate = degenerate && hi[static_cast<std::size_t>(d)] == lo[static_cast<std::size_t>(d)];
  if (degenerate) throw Error(ErrorKind::Degenerate, "all points coincide");

  const unsigned hw = worker_threads();
  BoxCountSeries out;
  out.scales = scales;
  for (double s : scales) {
    std::vector<std::uint64_t> extent(static_cast<std::size_t>(dim));
    double cells = 1.0;
    for (int d = 0; d < dim; ++d) {
      extent[static_cast<std::size_t>(d)] =
          static_cast<std::uint64_t>(std::floor((hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]) / s)) + 1;
      cells *= static_cast<double>(extent[static_cast<std::size_t>(d)]);
    }
    if (cells > 9e18) throw Error(ErrorKind::Resource, "grid too fine for 64-bit box keys");

    // Shard the key computation; sort and merge deterministically.
    std::vector<std::uint64_t> keys(n);
    std::vector<std::thread> workers;
    const std::size_t chunk = (n + hw - 1) / hw;
    for (unsigned t = 0; t < hw; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b >= e) break;
      workers.emplace_back([&, b, e] {
        for (std::size_t i = b; i < e; ++i) {
          std::uint64_t key = 0;
          for (int d = 0; d < dim; ++d) {
            const double v = pts.coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)];
            const auto idx = static_cast<std::uint64_t>(std::floor((v - lo[static_cast<std::size_t>(d)]) / s));
            key = key * extent[static_cast<std::size_t>(d)] + idx;
          }
          keys[i] = key;
        }
        std::sort(keys.begin() + static_cast<std::ptrdiff_t>(b), keys.begin() + static_cast<std::ptrdiff_t>(e));
      });
    }
    for (auto& w : workers) w.join();
    for (std::size_t t = 1; t < workers.size(); ++t) {
      const auto mid = keys.begin() + static_cast<std::ptrdiff_t>(t * chunk);
      const auto end = keys.begin() + static_cast<std::ptrdiff_t>(std::min(n, (t + 1) * chunk));
      std::inplace_merge(keys.begin(), mid, end);
    }
    out.counts.push_back(static_cast<long>(std::unique(keys.begin(), keys.end()) - keys.begin()));
  }
  fit_series(out, fit_lo, fit_hi);
  return out;
}

std::vector<double> geometric_scales(double largest, double decades, int n) {
  if (n < 2 || !(largest > 0.0) || !(decades > 0.0)) throw Error(ErrorKind::Configuration, "invalid scale ladder");
  std::vector<double> s;
  for (int i = 0; i < n; ++i) s.push_back(largest * std::pow(10.0, -decades * i / (n - 1)));
  return s;
}

std::vector<double> attractor_scales() { return geometric_scales(8.0, 1.5, 12); }

std::vector<IntervalQ> cantor_cylinders(const MapModel& m, const CantorSpec& spec, int depth,
                                        std::size_t max_intervals) {
  if (depth < 1) throw Error(ErrorKind::Configuration, "depth must be positive");
  if (spec.branches.empty()) throw Error(ErrorKind::Domain, "CantorSpec has no branches");
  const double total = std::pow(static_cast<double>(spec.branches.size()), depth);
  if (total > static_cast<double>(max_intervals)) throw Error(ErrorKind::Resource, "too many cylinders at this depth");
  std::vector<IntervalQ> level{spec.base};
  for (int d = 0; d < depth; ++d) {
    std::vector<IntervalQ> next;
    next.reserve(level.size() * spec.branches.size());
    for (const auto& b : spec.branches) {
      for (const auto& c : level) next.push_back(pull_back_branch(m, b, c));
    }
    level = std::move(next);
  }
  std::sort(level.begin(), level.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
  return level;
}

BoxCountSeries cantor_box_dimension(const MapModel& m, const CantorSpec& spec, int depth) {
  const auto cyl = cantor_cylinders(m, spec, depth);
  double widest = 0.0;
  for (const auto& c : cyl) widest = std::max(widest, c.length());
  const double base_len = spec.base.length();
  // Boxes must stay larger than every cylinder for the count to see the
  // limit set rather than the covering intervals.
  const double smallest = std::max(4.0 * widest, base_len * 1e-6);
  const double largest = base_len / 8.0;
  if (!(largest > 10.0 * smallest)) throw Error(ErrorKind::InsufficientData, "cylinders too coarse for a scale range");
  const int n = 10;
  BoxCountSeries out;
  for (int i = 0; i < n; ++i) out.scales.push_back(largest * std::pow(smallest / largest, static_cast<double>(i) / (n - 1)));
  const double origin = cyl.front().lo;
  for (double s : out.scales) {
    long count = 0;
    long last = std::numeric_limits<long>::min();
    for (const auto& c : cyl) {
      const long a = static_cast<long>(std::floor((c.lo - origin) / s));
      const long b = static_cast<long>(std::floor((c.hi - origin) / s));
      const long from = std::max(a, last + 1);
      if (b >= from) {
        count += b - from + 1;
        last = b;
      }
    }
    out.counts.push_back(count);
  }
  fit_series(out, 0, n);
  return out;
}

std::string AttractorReport::to_json() const {
  nlohmann::json j;
  j["d1"] = {{"d_low", d1.d_low}, {"d_up", d1.d_up}, {"method", d1.method}, {"metadata", d1.metadata}};
  j["stable_dim_low"] = stable_dim_low;
  j["stable_heuristic"] = stable_heuristic;
  j["section_bound"] = section_bound;
  j["flow_bound"] = flow_bound;
  j["certified_above_two"] = certified_above_two;
  if (certified_above_two) {
    j["statement"] = "HD(attractor) > 2 follows from the computed bounds";
  } else if (flow_bound > 2.0) {
    j["statement"] = "bound exceeds 2 only through the heuristic stable estimate; not certified";
  } else {
    j["statement"] = "computed bounds do not certify HD(attractor) > 2";
  }
  return j.dump(2);
}

AttractorReport attractor_report(const DimBounds& d1, double stable_dim_low, bool stable_heuristic) {
  AttractorReport r;
  r.d1 = d1;
  r.stable_dim_low = std::max(0.0, stable_dim_low);
  r.stable_heuristic = stable_heuristic;
  r.section_bound = d1.d_low + r.stable_dim_low;
  r.flow_bound = 1.0 + r.section_bound;
  // A heuristic stable part can suggest the threshold but never certify it.
  r.certified_above_two = !stable_heuristic && r.flow_bound > 2.0;
  return r;
}

double stable_slab_estimate(const std::vector<SectionPoint>& pts, double slab_width, double center) {
  if (!(slab_width > 0.0 && slab_width <= 0.05)) throw Error(ErrorKind::Configuration, "slab_width must lie in (0, 0.05]");
  PointCloud ys;
  ys.dim = 1;
  for (const auto& p : pts) {
    if (std::abs(p.x - center) <= 0.5 * slab_width) ys.coords.push_back(p.y);
  }
  if (ys.coords.size() < 1000) throw Error(ErrorKind::InsufficientData, "fewer than 1e3 points in the slab");
  const auto [mn, mx] = std::minmax_element(ys.coords.begin(), ys.coords.end());
  const double extent = *mx - *mn;
  if (!(extent > 0.0)) return 0.0;
  return box_dimension(ys, geometric_scales(extent / 4.0, 2.5, 8)).slope;
}

}  // namespace glorenz
