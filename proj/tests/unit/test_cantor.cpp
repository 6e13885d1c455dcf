#include <cmath>
#include <random>

#include "doctest.h"
#include "glorenz/cantor.hpp"
#include "glorenz/errors.hpp"
#include "glorenz/one_d.hpp"

using namespace glorenz;

namespace {

const MeasureApprox& measure() {
  static const MeasureApprox mu = ulam_measure(MapModel{}, 1024);
  return mu;
}

TheoremBuild build(int k, int cap = 10) {
  TheoremOptions opts;
  opts.m_cap = cap;
  return build_theorem_cantor(MapModel{}, measure(), k, opts);
}

}  // namespace

TEST_CASE("theorem construction at k = 2") {
  MapModel m;
  auto b = build(2);
  REQUIRE_FALSE(b.spec.branches.empty());
  CHECK(b.log.filters_monotone());
  CHECK(b.log.m_k == 10);
  CHECK(b.log.max_mass_error < 1e-6);
  auto mc = check_markov(m, b.spec);
  CHECK(mc.ok());
  // independent forward iteration of each branch interval
  for (const auto& br : b.spec.branches) {
    double lo = br.domain.lo, hi = br.domain.hi;
    for (int s = 0; s < br.total_iterates; ++s) {
      const double mid = m.eval(0.5 * (lo + hi));
      const bool pos = 0.5 * (lo + hi) > 0.0;
      lo = m.eval_side(lo, pos);
      hi = m.eval_side(hi, pos);
      CHECK(mid > std::min(lo, hi));
    }
    CHECK(lo == doctest::Approx(b.spec.base.lo).epsilon(1e-9));
    CHECK(std::abs(hi - b.spec.base.hi) < 1e-9);
  }
}

TEST_CASE("first level interval exists") {
  auto b = build(1);
  REQUIRE(b.log.level_intervals.size() == 1);
  CHECK(b.log.level_intervals[0].size() == 1);
  CHECK(b.log.level_iterates[0] >= 1);
  CHECK(b.log.gaps[0].size() == 2);
}

TEST_CASE("distortion ratio") {
  MapModel m;
  auto b = build(2);
  const double H = distortion_h(closed_form_constants(m));
  CHECK(H == doctest::Approx(0.4183551).epsilon(1e-6));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& br : b.spec.branches) {
    const double x = br.domain.lo + u(rng) * br.domain.length();
    CHECK(distortion_ratio(m, br, x, x) == 1.0);
    const double y = br.domain.lo + u(rng) * br.domain.length();
    const double r = distortion_ratio(m, br, x, y);
    CHECK(r >= H);
    CHECK(r <= 1.0 / H);
  }
  CHECK(b.log.ratio_min >= H);
  CHECK(b.log.ratio_max <= 1.0 / H);
}

TEST_CASE("nested family across k") {
  auto b1 = build(1), b2 = build(2), b3 = build(3);
  CHECK(nested_family(b1.log, b2.log));
  CHECK(nested_family(b2.log, b3.log));
  CHECK(nested_family(b1.log, b3.log));
  CHECK_FALSE(nested_family(b3.log, b1.log));
}

TEST_CASE("theorem construction is deterministic") {
  auto a = build(2, 12), b = build(2, 12);
  CHECK(to_json(a.spec) == to_json(b.spec));
  CHECK(to_json(a.log) == to_json(b.log));
}

TEST_CASE("theorem construction configuration") {
  CHECK_THROWS_AS(build(0), Error);
  CHECK_THROWS_AS(build(1, 7), Error);
  CHECK_THROWS_AS(build_theorem_cantor(MapModel{}, MeasureApprox{}, 1, TheoremOptions{}), Error);
}

TEST_CASE("direct builder") {
  MapModel m;
  auto s = build_direct_cantor(m, 1e-3, 4);
  REQUIRE_FALSE(s.branches.empty());
  CHECK(check_markov(m, s).ok());
  const double eta = closed_form_constants(m).eta;
  for (const auto& br : s.branches) {
    CHECK(br.lambda_min >= std::pow(eta, 4) * (1.0 - 1e-12));
    CHECK(br.domain.lo >= s.base.lo);
    CHECK(br.domain.hi <= s.base.hi);
  }
  try {
    build_direct_cantor(m, 0.4, 4);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptySpec);
  }
  std::size_t prev = 0;
  for (double d : {1e-2, 1e-3, 1e-4}) {
    auto sd = build_direct_cantor(m, d, 8);
    CHECK(sd.branches.size() >= prev);
    prev = sd.branches.size();
  }
  CHECK_THROWS_AS(build_direct_cantor(m, 0.0, 4), Error);
  CHECK_THROWS_AS(build_direct_cantor(m, 1e-3, 13), Error);
}

TEST_CASE("CantorSpec JSON round trip") {
  MapModel m;
  auto s = build_direct_cantor(m, 1e-2, 6);
  auto back = cantor_from_json(to_json(s));
  REQUIRE(back.branches.size() == s.branches.size());
  CHECK(back.base.lo == s.base.lo);
  CHECK(back.branches[0].sides == s.branches[0].sides);
  CHECK(check_markov(m, back).ok());
  CHECK_THROWS_AS(cantor_from_json("{not json"), Error);
}
