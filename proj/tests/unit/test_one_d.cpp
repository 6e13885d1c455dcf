#include <cmath>
#include <random>

#include "doctest.h"
#include "glorenz/errors.hpp"
#include "glorenz/one_d.hpp"

using namespace glorenz;

TEST_CASE("default map values") {
  MapModel m;
  CHECK(m.eval(0.5) == doctest::Approx(0.4810959).epsilon(1e-7));
  CHECK(m.deriv(0.5) == doctest::Approx(1.4716438).epsilon(1e-7));
  CHECK(m.eval(0.25) == doctest::Approx(0.0833631).epsilon(1e-6));
  CHECK(m.eval(-0.5) == doctest::Approx(-0.4810959).epsilon(1e-7));
  CHECK(m.eval_side(0.0, true) == -0.5);
  CHECK(m.eval_side(0.0, false) == 0.5);
  CHECK_THROWS_AS(m.eval(0.0), Error);
}

TEST_CASE("zero preimages") {
  MapModel m;
  auto z = zero_preimages(m);
  CHECK(z.z2 == doctest::Approx(0.2035392).epsilon(1e-7));
  CHECK(z.z1 == doctest::Approx(-0.2035392).epsilon(1e-7));
  CHECK(z.z2_2 == doctest::Approx(0.3209267).epsilon(1e-7));
  CHECK(z.z1_1 == doctest::Approx(-0.3209267).epsilon(1e-7));
  CHECK(z.z2_1 == doctest::Approx(-0.1013859).epsilon(1e-7));
  CHECK(z.z1_2 == doctest::Approx(0.1013859).epsilon(1e-7));
  CHECK(std::abs(m.eval(z.z2)) < 1e-12);
  CHECK(std::abs(m.eval(z.z2_2) - z.z2) < 1e-12);
  CHECK(compute_kappa(m) == doctest::Approx(0.1021533).epsilon(1e-7));
}

TEST_CASE("distortion constants: closed form against sampling") {
  MapModel m;
  auto k = closed_form_constants(m);
  CHECK(k.eta == doctest::Approx(1.4716438).epsilon(1e-7));
  CHECK(k.C == doctest::Approx(1.2375));
  CHECK(k.C1 == doctest::Approx(0.309375));
  auto e = estimated_constants(m);
  CHECK(e.eta == doctest::Approx(k.eta).epsilon(1e-5));
  CHECK(e.C == doctest::Approx(k.C).epsilon(1e-5));
  CHECK(e.C1 == doctest::Approx(k.C1).epsilon(1e-4));
  CHECK(distortion_h(k) == doctest::Approx(0.4183551).epsilon(1e-7));
  CHECK(1.0 / distortion_h(k) == doctest::Approx(2.3903138).epsilon(1e-7));
}

TEST_CASE("map properties") {
  MapModel m;
  CHECK(verify_map_properties(m).ok());
  MapModel flat = MapModel::symmetric(0.75, 0.9);
  CHECK_FALSE(verify_map_properties(flat).f2);
}

TEST_CASE("cut parameter") {
  MapModel m;
  CHECK(choose_a(m, 0.005) == doctest::Approx(0.9659754).epsilon(1e-6));
  const double t = r2_threshold(m);
  CHECK(t == doctest::Approx(0.9974172).epsilon(1e-6));
  CHECK_FALSE(r2_check(m, 0.9659754).holds);
  const double a = choose_aleo_a(m, 0.005);
  CHECK(a > t);
  CHECK(a < 1.0);
  CHECK(r2_check(m, a).holds);
}

TEST_CASE("leo iteration reaches I") {
  MapModel m;
  auto run = leo_iterate(m, {0.3, 0.3001});
  CHECK(run.n >= 2);
  CHECK(run.growth_ok);
  auto wide = leo_iterate(m, {-0.4, 0.4});
  CHECK(wide.n >= 1);
}

TEST_CASE("leo pullback lands on a half") {
  MapModel m;
  auto pb = leo_pullback(m, {0.31, 0.315}, true);
  IntervalQ img = pb.domain;
  for (int i = 0; i < pb.n; ++i) img = m.image(img);
  CHECK(img.lo == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(std::abs(img.hi) < 1e-9);
}

TEST_CASE("almost leo on random intervals") {
  MapModel m;
  m.cut = choose_aleo_a(m, 0.005);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_real_distribution<double> len(1.0 / 24000.0, 0.2);
  const double d = aleo_d_constant(m);
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    const double l = len(rng);
    double lo = u(rng);
    if (lo + l > 0.5) lo = 0.5 - l;
    auto res = almost_leo(m, {lo, lo + l});
    CHECK(res.terminal_matches());
    CHECK(res.avoids_zero());
    CHECK(res.n <= res.n_bound);
    CHECK(res.n <= d * std::log(20.0));
    CHECK(res.j_prime.lo >= lo - 1e-15);
    CHECK(res.j_prime.hi <= lo + l + 1e-15);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("almost leo needs an admissible cut") {
  MapModel m;
  CHECK_THROWS_AS(almost_leo(m, {0.3, 0.4}), Error);
  m.cut = 0.9659754;
  CHECK_THROWS_AS(almost_leo(m, {0.3, 0.4}), Error);
}

TEST_CASE("choose_a binding constraint") {
  CHECK(choose_a(2.0, 0.5, 0.005) == doctest::Approx(1.0 / std::sqrt(2.0) + 0.005));
  CHECK_THROWS_AS(choose_a(1.3, 0.5, 0.005), Error);
}
