#include <cmath>
#include <numeric>

#include "doctest.h"
#include "glorenz/errors.hpp"
#include "glorenz/ulam.hpp"

using namespace glorenz;

TEST_CASE("Ulam measure is a normalized, nearly invariant density") {
  MapModel m;
  auto mu = ulam_measure(m, 1024);
  const double total = std::accumulate(mu.masses.begin(), mu.masses.end(), 0.0);
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(mu.stationarity_residual < 1e-8);
  CHECK(mu.invariance_residual < 1e-3);
  CHECK(mu.density_sup > 1.0);
  CHECK(mu.cdf(-0.5) == 0.0);
  CHECK(mu.cdf(0.5) == 1.0);
  // symmetric map, symmetric measure
  CHECK(mu.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(mu.inverse_cdf(mu.cdf(0.123)) == doctest::Approx(0.123).epsilon(1e-9));
  CHECK(mu.mass({-0.1, 0.1}) <= mu.density_sup * 0.2 + 1e-12);
}

TEST_CASE("Ulam refinement") {
  MapModel m;
  auto a = ulam_measure(m, 512);
  auto b = ulam_measure(m, 1024);
  auto c = ulam_measure(m, 2048);
  MESSAGE("residuals " << a.invariance_residual << " " << b.invariance_residual << " " << c.invariance_residual);
  CHECK(b.invariance_residual < a.invariance_residual);
  CHECK(c.invariance_residual < b.invariance_residual);
  CHECK(density_l1_distance(b, c) < density_l1_distance(a, b) * 1.5);
}

TEST_CASE("Ulam configuration") {
  MapModel m;
  CHECK_THROWS_AS(ulam_measure(m, 100), Error);
  CHECK_THROWS_AS(ulam_measure(m, 16), Error);
}
