#include <cmath>
#include <random>

#include "doctest.h"
#include "glorenz/errors.hpp"
#include "glorenz/fractal_dim.hpp"

using namespace glorenz;

namespace {

CantorSpec flat_spec(std::vector<std::pair<double, double>> lambdas) {
  CantorSpec s;
  s.base = {0.0, 1.0};
  for (auto [lo, hi] : lambdas) {
    CantorBranch b;
    b.lambda_min = lo;
    b.lambda_max = hi;
    s.branches.push_back(b);
  }
  return s;
}

}  // namespace

TEST_CASE("Moran equation closed forms") {
  CHECK(moran_solve({1.0 / 3, 1.0 / 3}, MoranMode::Contraction) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-11));
  CHECK(moran_solve({0.5, 0.5}, MoranMode::Contraction) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(moran_solve({4, 4, 4}, MoranMode::Expansion) == doctest::Approx(std::log(3.0) / std::log(4.0)).epsilon(1e-11));
  CHECK(moran_solve({0.5}, MoranMode::Contraction) == 0.0);
  const std::vector<double> v{0.2, 0.35, 0.4};
  const double d = moran_solve(v, MoranMode::Contraction);
  double s = 0.0;
  for (double r : v) s += std::pow(r, d);
  CHECK(std::abs(s - 1.0) < 1e-10);
  CHECK(moran_solve({0.2, 0.35, 0.4, 0.1}, MoranMode::Contraction) > d);
  CHECK(moran_solve({3, 5}, MoranMode::Expansion) > moran_solve({3.3, 5.5}, MoranMode::Expansion));
  CHECK_THROWS_AS(moran_solve({1.2}, MoranMode::Contraction), Error);
  CHECK_THROWS_AS(moran_solve({0.5}, MoranMode::Expansion), Error);
  CHECK_THROWS_AS(moran_solve({}, MoranMode::Expansion), Error);
}

TEST_CASE("d1 bounds") {
  auto d = d1_bounds(flat_spec({{3, 3}, {3, 3}}));
  CHECK(d.d_low == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
  CHECK(d.d_up == doctest::Approx(d.d_low).epsilon(1e-10));
  auto e = d1_bounds(flat_spec({{2, 4}, {2, 4}}));
  CHECK(e.d_low == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e.d_up == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(d1_bounds(flat_spec({{1.0, 2.0}})), Error);

  MapModel m;
  auto spec = build_direct_cantor(m, 1e-3, 4);
  auto b = d1_bounds(spec);
  CHECK(b.d_low < b.d_up);
  CHECK(b.d_low > 0.0);
  CHECK(b.d_up < 1.0);
}

TEST_CASE("box counting oracles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud sq;
  sq.dim = 2;
  for (int i = 0; i < 1000000; ++i) sq.add({u(rng), u(rng)});
  auto s = box_dimension(sq, geometric_scales(0.1, 1.5, 8));
  CHECK(s.slope == doctest::Approx(2.0).epsilon(0.025));

  PointCloud line;
  line.dim = 3;
  for (int i = 0; i < 100000; ++i) {
    const double t = u(rng);
    line.add({t, 2.0 * t, -t});
  }
  auto l = box_dimension(line, geometric_scales(0.1, 1.5, 8));
  CHECK(l.slope == doctest::Approx(1.0).epsilon(0.05));
  for (std::size_t i = 1; i < l.counts.size(); ++i) CHECK(l.counts[i] >= l.counts[i - 1]);
  CHECK(l.to_csv().rfind("scale,count\n", 0) == 0);

  // middle thirds to depth 12
  PointCloud ct;
  ct.dim = 1;
  for (int w = 0; w < 4096; ++w) {
    double x = 0.0, scale = 1.0;
    for (int bit = 11; bit >= 0; --bit) {
      scale /= 3.0;
      if ((w >> bit) & 1) x += 2.0 * scale;
    }
    ct.add({x});
  }
  std::vector<double> sc;
  for (int k = 1; k <= 9; ++k) sc.push_back(std::pow(3.0, -k) * 1.0001);
  auto c = box_dimension(ct, sc);
  CHECK(std::abs(c.slope - std::log(2.0) / std::log(3.0)) < 0.03);
}

TEST_CASE("box counting errors") {
  PointCloud same;
  same.dim = 2;
  for (int i = 0; i < 100; ++i) same.add({0.3, 0.3});
  CHECK_THROWS_AS(box_dimension(same, geometric_scales(0.1, 2, 5)), Error);
  PointCloud small;
  small.dim = 3;
  for (int i = 0; i < 100; ++i) small.add({i * 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(box_dimension(small, geometric_scales(0.1, 2, 5)), Error);
  PointCloud ok;
  ok.dim = 1;
  for (int i = 0; i < 100; ++i) ok.add({i * 0.01});
  CHECK_THROWS_AS(box_dimension(ok, geometric_scales(0.1, 1.0, 5)), Error);
  CHECK_THROWS_AS(box_dimension(ok, {0.1, 0.01, 0.05, 0.001}), Error);
}

TEST_CASE("box counting is deterministic") {
  auto orb = ode_orbit(OdeParams{}, {1, 1, 1}, 0.02, 20000, 1000);
  auto a = box_dimension(to_cloud(orb), attractor_scales());
  auto b = box_dimension(to_cloud(orb), attractor_scales());
  CHECK(a.counts == b.counts);
  CHECK(a.slope == b.slope);
}

TEST_CASE("d1 sandwich on direct specs") {
  MapModel m;
  for (double delta : {1e-2, 1e-3}) {
    auto spec = build_direct_cantor(m, delta, 4);
    auto b = d1_bounds(spec);
    auto box = cantor_box_dimension(m, spec, 6);
    CHECK(box.slope >= b.d_low - 0.05);
    CHECK(box.slope <= b.d_up + 0.05);
  }
  auto spec = build_direct_cantor(m, 1e-3, 4);
  CHECK(cantor_cylinders(m, spec, 2).size() == spec.branches.size() * spec.branches.size());
}

TEST_CASE("monotone refinement in delta") {
  MapModel m;
  double prev = 0.0;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double d = d1_bounds(build_direct_cantor(m, delta, 8)).d_low;
    CHECK(d >= prev - 1e-9);
    prev = d;
  }
}

TEST_CASE("attractor report") {
  DimBounds d;
  d.d_low = 0.9;
  auto r = attractor_report(d, 0.2);
  CHECK(r.flow_bound == doctest::Approx(2.1));
  CHECK(r.certified_above_two);
  d.d_low = 0.6;
  auto s = attractor_report(d, 0.0);
  CHECK(s.flow_bound == doctest::Approx(1.6));
  CHECK_FALSE(s.certified_above_two);
  CHECK(s.to_json().find("do not certify") != std::string::npos);
  d.d_low = 0.9;
  auto h = attractor_report(d, 0.2, true);
  CHECK(h.flow_bound == doctest::Approx(2.1));
  CHECK_FALSE(h.certified_above_two);
  CHECK(h.to_json().find("heuristic") != std::string::npos);
}

TEST_CASE("stable slab estimate") {
  GeoParams p;
  auto orb = section_orbit(p, {0.3, 0.1}, 200000, 100);
  const double v = stable_slab_estimate(orb, 0.05);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  GeoParams flat = p;
  flat.g_gain = 0.0;
  auto orb0 = section_orbit(flat, {0.3, 0.1}, 200000, 100);
  CHECK(stable_slab_estimate(orb0, 0.05) == doctest::Approx(0.0).epsilon(0.05));
  CHECK_THROWS_AS(stable_slab_estimate(orb, 1e-7), Error);
  CHECK_THROWS_AS(stable_slab_estimate(orb, 0.2), Error);
}
