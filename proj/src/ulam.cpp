#include "glorenz/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glorenz/errors.hpp"

namespace glorenz {

namespace {

constexpr int kSubdivisions = 32;
constexpr int kMaxSweeps = 100000;
constexpr double kSweepTol = 1e-14;

struct SparseRow {
  std::vector<int> cols;
  std::vector<double> weights;
};

int bin_of(double y, int bins) {
  const int i = static_cast<int>(std::floor((y + 0.5) * bins));
  return std::clamp(i, 0, bins - 1);
}

std::vector<double> transfer(const std::vector<SparseRow>& rows, const std::vector<double>& v) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t k = 0; k < rows[i].cols.size(); ++k) {
      out[static_cast<std::size_t>(rows[i].cols[k])] += vi * rows[i].weights[k];
    }
  }
  return out;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

double MeasureApprox::cdf(double x) const {
  if (x <= -0.5) return 0.0;
  if (x >= 0.5) return 1.0;
  const double pos = (x + 0.5) * bins;
  const int i = std::min(static_cast<int>(std::floor(pos)), bins - 1);
  double s = 0.0;
  for (int k = 0; k < i; ++k) s += masses[static_cast<std::size_t>(k)];
  return s + masses[static_cast<std::size_t>(i)] * (pos - i);
}

double MeasureApprox::inverse_cdf(double p) const {
  double lo = -0.5;
  double hi = 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MeasureApprox ulam_measure(const MapModel& m, int bins) {
  if (bins < 64 || (bins & (bins - 1)) != 0) {
    throw Error(ErrorKind::Configuration, "bins must be a power of two >= 64");
  }
  const double w = 1.0 / bins;
  std::vector<SparseRow> rows(static_cast<std::size_t>(bins));
  // Each sub-interval is pushed forward as an interval and its mass spread
  // uniformly over the image; bins never straddle 0 since 0 is a grid point.
  std::vector<double> acc(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    const bool positive = i >= bins / 2;
    std::fill(acc.begin(), acc.end(), 0.0);
    int first = bins, last = -1;
    for (int s = 0; s < kSubdivisions; ++s) {
      const double x0 = -0.5 + (i + static_cast<double>(s) / kSubdivisions) * w;
      const double x1 = -0.5 + (i + static_cast<double>(s + 1) / kSubdivisions) * w;
      const double y0 = std::clamp(m.eval_side(x0, positive), -0.5, 0.5);
      const double y1 = std::clamp(m.eval_side(x1, positive), -0.5, 0.5);
      const double lo = std::min(y0, y1), hi = std::max(y0, y1);
      const double piece = 1.0 / kSubdivisions;
      const int b0 = bin_of(lo, bins), b1 = bin_of(hi, bins);
      first = std::min(first, b0);
      last = std::max(last, b1);
      if (b0 == b1 || hi <= lo) {
        acc[static_cast<std::size_t>(b0)] += piece;
        continue;
      }
      for (int b = b0; b <= b1; ++b) {
        const double u = std::max(lo, -0.5 + b * w), v = std::min(hi, -0.5 + (b + 1) * w);
        if (v > u) acc[static_cast<std::size_t>(b)] += piece * (v - u) / (hi - lo);
      }
    }
    SparseRow& row = rows[static_cast<std::size_t>(i)];
    for (int b = first; b <= last; ++b) {
      if (acc[static_cast<std::size_t>(b)] > 0.0) {
        row.cols.push_back(b);
        row.weights.push_back(acc[static_cast<std::size_t>(b)]);
      }
    }
  }

  MeasureApprox mu;
  mu.bins = bins;
  std::vector<double> v(static_cast<std::size_t>(bins), w);
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    std::vector<double> next = transfer(rows, v);
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& x : next) x /= total;
    const double diff = l1(next, v);
    v = std::move(next);
    if (diff < kSweepTol) break;
  }
  if (sweep == kMaxSweeps) throw Error(ErrorKind::Numeric, "Ulam power iteration did not converge");

  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  mu.masses = v;
  mu.sweeps = sweep + 1;
  mu.stationarity_residual = l1(transfer(rows, v), v);
  mu.density_sup = *std::max_element(v.begin(), v.end()) / w;
  mu.invariance_residual = exact_invariance_residual(m, mu);
  return mu;
}

double exact_invariance_residual(const MapModel& m, const MeasureApprox& mu) {
  // Perron-Frobenius image of the piecewise-constant density,
  //   (T rho)(y) = sum over branches of rho(x) / f'(x), f(x) = y,
  // compared with rho in L1 by midpoint quadrature on a refined grid.
  constexpr int kQuad = 64;
  const double w = mu.bin_width();
  const double h = w / kQuad;
  const double left_lo = m.left(-0.5), left_hi = m.offset_left;
  const double right_lo = m.offset_right, right_hi = m.right(0.5);
  auto rho = [&](double x) {
    const int i = std::clamp(static_cast<int>(std::floor((x + 0.5) * mu.bins)), 0, mu.bins - 1);
    return mu.density(i);
  };
  double res = 0.0;
  for (int i = 0; i < mu.bins; ++i) {
    const double own = mu.density(i);
    for (int q = 0; q < kQuad; ++q) {
      const double y = mu.bin_lo(i) + (q + 0.5) * h;
      double pushed = 0.0;
      if (y > left_lo && y < left_hi) {
        const double x = m.left_inverse(y);
        if (x < 0.0) pushed += rho(x) / m.deriv(x);
      }
      if (y > right_lo && y < right_hi) {
        const double x = m.right_inverse(y);
        if (x > 0.0) pushed += rho(x) / m.deriv(x);
      }
      res += std::abs(pushed - own) * h;
    }
  }
  return res;
}

double density_l1_distance(const MeasureApprox& a, const MeasureApprox& b) {
  const MeasureApprox& fine = a.bins >= b.bins ? a : b;
  const MeasureApprox& coarse = a.bins >= b.bins ? b : a;
  const int ratio = fine.bins / coarse.bins;
  double s = 0.0;
  for (int i = 0; i < fine.bins; ++i) {
    s += std::abs(fine.density(i) - coarse.density(i / ratio)) * fine.bin_width();
  }
  return s;
}

}  // namespace glorenz
