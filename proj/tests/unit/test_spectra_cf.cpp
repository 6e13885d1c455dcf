#include <cmath>

#include "doctest.h"
#include "glorenz/errors.hpp"
#include "glorenz/spectra_cf.hpp"

using namespace glorenz;

TEST_CASE("continued fraction values") {
  CHECK(cf_value(CFWord::parse("[;(1)]")) == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(cf_value(CFWord::parse("[;(2)]")) == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cf_value(CFWord::parse("[0;(2)]")) == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-14));
  CHECK(cf_value(CFWord::parse("[3;7,15,1,292]")) == doctest::Approx(3.14159265301).epsilon(1e-11));
  for (const char* w : {"[;(1)]", "[2;(2,1,1,2)]", "[1;3,(4,1)]", "[0;(1,4)]"}) {
    const auto cw = CFWord::parse(w);
    CHECK(std::abs(cf_value(cw, 60) - cf_value(cw, 120)) < 1e-10);
  }
  CHECK_THROWS_AS(cf_value(CFWord::parse("[;(1)]"), 10), Error);
  CFWord bad = CFWord::periodic({1, 0});
  CHECK_THROWS_AS(cf_value(bad), Error);
}

TEST_CASE("word parsing round trip") {
  const auto w = CFWord::parse("[2; (2, 1, 1, 2)]");
  REQUIRE(w.head.has_value());
  CHECK(*w.head == 2);
  CHECK(w.preperiod.empty());
  CHECK(w.period == std::vector<long>{2, 1, 1, 2});
  CHECK(w.to_string() == "[2;(2,1,1,2)]");
  CHECK(CFWord::parse("[;3,1,(4)]").to_string() == "[;3,1,(4)]");
  CHECK_FALSE(CFWord::parse("[;(1)]").head.has_value());
  CHECK_THROWS_AS(CFWord::parse("2;(1)"), Error);
  CHECK_THROWS_AS(CFWord::parse("[;()]"), Error);
  CHECK_THROWS_AS(CFWord::parse("[;(1,x)]"), Error);
}

TEST_CASE("Perron values of periodic words") {
  CHECK(perron_k(CFWord::parse("[;(1)]")).value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
  CHECK(perron_k(CFWord::parse("[;(2)]")).value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(perron_k(CFWord::parse("[;(2,2,1,1)]")).value == doctest::Approx(std::sqrt(221.0) / 5).epsilon(1e-13));
  // Single letters: a + 2(sqrt(a^2 + 4) - a)/2 = sqrt(a^2 + 4).
  for (long a : {3L, 4L, 7L}) {
    CHECK(perron_k(CFWord::periodic({a})).value == doctest::Approx(std::sqrt(double(a * a + 4))).epsilon(1e-13));
  }
  // Preperiod and head do not change the limsup.
  CHECK(perron_k(CFWord::parse("[5;3,3,(2,2,1,1)]")).value == perron_k(CFWord::parse("[;(2,2,1,1)]")).value);
  CHECK_THROWS_AS(perron_k(CFWord::parse("[1;2,3]")), Error);
}

TEST_CASE("Perron value is rotation invariant and above the Hurwitz floor") {
  const std::vector<long> base{3, 1, 2, 1, 1, 4};
  const double k0 = perron_k(CFWord::periodic(base)).value;
  for (std::size_t r = 1; r < base.size(); ++r) {
    std::vector<long> rot(base.begin() + long(r), base.end());
    rot.insert(rot.end(), base.begin(), base.begin() + long(r));
    CHECK(perron_k(CFWord::periodic(rot)).value == doctest::Approx(k0).epsilon(1e-14));
  }
  for (int len = 1; len <= 4; ++len) {
    for (int code = 0; code < (1 << (2 * len)); ++code) {
      std::vector<long> w;
      for (int i = 0; i < len; ++i) w.push_back(1 + ((code >> (2 * i)) & 3));
      CHECK(perron_k(CFWord::periodic(w)).value >= std::sqrt(5.0) - 1e-12);
    }
  }
}

TEST_CASE("Markov head enumeration") {
  const auto h = enumerate_head(4, 2);
  REQUIRE(h.size() >= 3);
  CHECK(std::abs(h[0].value - std::sqrt(5.0)) < 1e-9);
  CHECK(std::abs(h[1].value - 2 * std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(h[2].value - std::sqrt(221.0) / 5) < 1e-9);

  // Brute force: third-smallest value over all period <= 4 words on {1,2}.
  std::vector<double> all;
  for (int len = 1; len <= 4; ++len) {
    for (int code = 0; code < (1 << len); ++code) {
      std::vector<long> w;
      for (int i = 0; i < len; ++i) w.push_back(1 + ((code >> i) & 1));
      all.push_back(perron_k(CFWord::periodic(w)).value);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(), [](double a, double b) { return b - a < 1e-9; }), all.end());
  CHECK(all[2] == doctest::Approx(h[2].value).epsilon(1e-12));

  const auto one = enumerate_head(1, 4);
  REQUIRE(one.size() == 2);
  CHECK(one[1].value == doctest::Approx(2 * std::sqrt(2.0)));
  const auto ones = enumerate_head(6, 1);
  REQUIRE(ones.size() == 1);
  CHECK(ones[0].witness.period.size() == 1);

  CHECK_THROWS_AS(enumerate_head(9, 2), Error);
  CHECK_THROWS_AS(enumerate_head(4, 5), Error);
}

TEST_CASE("Markov head values have rational squares") {
  const auto h = enumerate_head(8, 4);
  for (size_t i = 1; i < h.size(); ++i) CHECK(h[i].value > h[i - 1].value);
  for (const auto& v : h) {
    CHECK(v.value < 3.0);
    const double sq = v.value * v.value;
    CHECK(std::abs(nearest_rational(sq, 10000).value() - sq) < 1e-8);
  }
  CHECK(head_csv(h).rfind("value,witness_word,shift\n", 0) == 0);
}

TEST_CASE("nearest rational") {
  const auto r = nearest_rational(M_PI, 1000);
  CHECK(r.p == 355);
  CHECK(r.q == 113);
  CHECK(nearest_rational(221.0 / 25.0, 10000).q == 25);
}

TEST_CASE("bounded-digit cylinders") {
  const IntervalQ hull = bounded_cf_hull(4);
  CHECK(hull.lo == doctest::Approx((std::sqrt(2.0) - 1) / 2).epsilon(1e-14));
  CHECK(hull.hi == doctest::Approx(2 * (std::sqrt(2.0) - 1)).epsilon(1e-14));
  const auto cyl = bounded_cf_cylinders(4, 1e-3);
  for (const auto& c : cyl) {
    CHECK(c.length() < 1e-3);
    CHECK(c.lo >= hull.lo - 1e-15);
    CHECK(c.hi <= hull.hi + 1e-15);
  }
  CHECK_THROWS_AS(bounded_cf_cylinders(4, 1e-6, 1000), Error);
}

TEST_CASE("Hall sum covering") {
  const auto h = hall_sum_check(1e-3);
  CHECK(h.verified);
  CHECK(h.max_gap == 0.0);
  CHECK(h.target.lo == doctest::Approx(0.41521).epsilon(1e-5));
  CHECK(h.target.hi == doctest::Approx(1.65585).epsilon(1e-5));
  CHECK(h.contains(1.0));
  CHECK_FALSE(h.contains(0.3));
  CHECK_FALSE(h.contains(1.7));
  const auto coarse = hall_sum_check(1e-2);
  CHECK(coarse.verified);
  CHECK(coarse.cylinders < h.cylinders);
  CHECK_THROWS_AS(hall_sum_check(0.1), Error);
  try {
    hall_sum_check(1e-4, 1000);
    FAIL("expected resource error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resource);
  }
}

TEST_CASE("Freiman constant") {
  CHECK(std::abs(freiman_constant() - 4.527829566) < 1e-8);
  CHECK(freiman_constant() > 3.0);
  CHECK(freiman_constant() < 6.0);
}

TEST_CASE("bounded-digit cylinders are nested and shrink") {
  std::vector<std::vector<long>> words{{}};
  double worst = 0.0;
  for (int depth = 0; depth < 5; ++depth) {
    std::vector<std::vector<long>> next;
    for (const auto& w : words) {
      const IntervalQ parent = bounded_cf_cylinder(w, 4);
      for (long a = 1; a <= 4; ++a) {
        auto c = w;
        c.push_back(a);
        const IntervalQ child = bounded_cf_cylinder(c, 4);
        CHECK(child.lo >= parent.lo - 1e-15);
        CHECK(child.hi <= parent.hi + 1e-15);
        worst = std::max(worst, child.length() / parent.length());
        next.push_back(c);
      }
    }
    words = std::move(next);
  }
  CHECK(worst < 0.5);
}
