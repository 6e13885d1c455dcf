#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glorenz/map_model.hpp"

namespace glorenz {

/// Eventually periodic continued fraction [head; preperiod, (period)].
/// Without a head the sequence starts at the preperiod, so "[;(1)]" is the
/// golden ratio and "[0;(2)]" is sqrt(2) - 1.
struct CFWord {
  std::optional<long> head;
  std::vector<long> preperiod;
  std::vector<long> period;

  static CFWord parse(const std::string& text);
  static CFWord periodic(std::vector<long> period);
  std::string to_string() const;
};

struct SpectrumValue {
  double value = 0.0;
  CFWord witness;
  int shift = 0;  // index into the one-sided sequence where the max is attained
};

double cf_value(const CFWord& w, int terms = 200);

/// max over one period of shifts of alpha_n + beta_n.
SpectrumValue perron_k(const CFWord& w);

/// Distinct values below 3 over all necklaces of length <= max_period with
/// digits in 1..alphabet_max, sorted and deduplicated at 1e-9.
std::vector<SpectrumValue> enumerate_head(int max_period, int alphabet_max);

std::string head_csv(const std::vector<SpectrumValue>& values);

/// Best rational approximation p/q of x with q <= max_den.
struct Rational {
  long p = 0;
  long q = 1;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};
Rational nearest_rational(double x, long max_den);

/// Hull of the cylinder of numbers whose expansion starts with `word`.
IntervalQ bounded_cf_cylinder(const std::vector<long>& word, int max_digit);
/// Bounded-digit Cantor set: continued fractions [0; a1, a2, ...] with a_i <= max_digit.
/// Cylinder hulls are refined until narrower than `max_width`.
std::vector<IntervalQ> bounded_cf_cylinders(int max_digit, double max_width, std::size_t budget = 2000000);
/// Hull of the whole set: [[0; m, 1, m, 1, ...], [0; 1, m, 1, m, ...]].
IntervalQ bounded_cf_hull(int max_digit);

struct HallCover {
  double resolution = 0.0;
  IntervalQ target;              // [sqrt2 - 1 + res, 4(sqrt2 - 1) - res]
  std::vector<IntervalQ> cover;  // merged union of pairwise hull sums
  std::size_t cylinders = 0;
  std::size_t merged_cylinders = 0;
  std::size_t pairs = 0;
  double max_gap = 0.0;  // largest uncovered stretch inside the target
  bool verified = false;

  bool contains(double x) const;
  std::string to_json() const;
};

/// Numerical covering check of C(4) + C(4) at the given resolution.
HallCover hall_sum_check(double resolution, std::size_t pair_budget = 200000000);

double freiman_constant();

}  // namespace glorenz
