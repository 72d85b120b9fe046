#include "geoflow/errors.hpp"
#include "geoflow/minimality.hpp"
#include "support.hpp"

#include <numbers>

using namespace geoflow;
using geoflow::test::vec;

TEST_CASE("king-move anisotropy constant") {
  CHECK(kKingMoveAnisotropy == doctest::Approx(1.0 / std::cos(std::numbers::pi / 8)).epsilon(1e-15));
}

TEST_CASE("oracle lattice") {
  const GraphSurface flat = make_catalog_surface("flat");
  const MeshGeodesicOracle o = build_mesh_oracle(flat, 16);
  CHECK(o.step() == doctest::Approx(0.125));
  CHECK(o.vertex_count() == 17 * 17);
  CHECK(o.offsets().size() == 8);
  CHECK(o.slope_factor() == 1.0);
  CHECK(o.hess_bound() == 0.0);
  const std::size_t v = o.snap(vec({0.01, -0.02}));
  CHECK(test::max_abs(o.vertex(v) - vec({0, 0})) < 1e-15);
  CHECK_THROWS_AS(o.snap(vec({1.5, 0})), OutOfChart);
  CHECK_THROWS_AS(build_mesh_oracle(flat, 4), ConfigError);

  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const MeshGeodesicOracle s = build_mesh_oracle(sphere, 16);
  std::size_t inactive = 0;
  for (std::size_t i = 0; i < s.vertex_count(); ++i) inactive += s.active(i) ? 0 : 1;
  CHECK(inactive > 0);
  const std::size_t corner = s.snap(vec({0.55, 0.55}));
  CHECK(sphere.contains(s.vertex(corner)));
}

TEST_CASE("flat mesh distance") {
  const GraphSurface flat = make_catalog_surface("flat");
  const MeshGeodesicOracle o = build_mesh_oracle(flat, 128);
  CHECK(std::abs(shortest_path_length(o, vec({0, 0}), vec({0.5, 0})) - 0.5) <= o.step());
  CHECK(shortest_path_length(o, vec({0.2, 0.2}), vec({0.2, 0.2})) == 0.0);

  // Vertex endpoints: Euclidean distance <= mesh distance <= sec(pi/8) * Euclidean distance.
  std::mt19937_64 rng(89);
  for (int n = 0; n < 20; ++n) {
    const Vector p = o.vertex(o.snap(test::random_point(flat.domain(), rng)));
    const Vector q = o.vertex(o.snap(test::random_point(flat.domain(), rng)));
    const double d = (p - q).norm();
    const double mesh = shortest_path_length(o, p, q);
    CHECK(mesh >= d - 1e-12);
    CHECK(mesh <= d * kKingMoveAnisotropy + 1e-12);
  }
}

TEST_CASE("hemisphere mesh distance brackets the great-circle distance") {
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const double exact = std::asin(0.5);
  double previous = 1.0;
  for (int res : {32, 64, 128}) {
    const MeshGeodesicOracle o = build_mesh_oracle(sphere, res);
    const MeshPath path = shortest_path(o, vec({0, 0}), vec({0.5, 0}));
    CHECK(path.snap_p == 0.0);
    CHECK(path.snap_q < 1e-15);
    const double edge = o.step() * std::sqrt(2.0);
    const double deficit = path.hops * o.hess_bound() * o.hess_bound() * edge * edge * edge / 8.0;
    CHECK(path.length <= exact + 1e-12);
    CHECK(path.length >= exact - deficit);
    const double err = exact - path.length;
    CHECK(err <= previous);
    previous = err;
  }
}

TEST_CASE("mesh distance is a metric on vertices") {
  const GraphSurface trough = make_catalog_surface("trough");
  const MeshGeodesicOracle o = build_mesh_oracle(trough, 32);
  std::mt19937_64 rng(97);
  for (int n = 0; n < 10; ++n) {
    const Vector a = test::random_point(trough.domain(), rng);
    const Vector b = test::random_point(trough.domain(), rng);
    const Vector c = test::random_point(trough.domain(), rng);
    const double ab = shortest_path_length(o, a, b), bc = shortest_path_length(o, b, c);
    const double ac = shortest_path_length(o, a, c);
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(ab == doctest::Approx(shortest_path_length(o, b, a)).epsilon(1e-14));
  }
}

TEST_CASE("curve length") {
  const GraphSurface flat = make_catalog_surface("flat");
  CHECK(curve_length(flat, {vec({0, 0}), vec({0.6, 0}), vec({0.6, 0.4})}) == doctest::Approx(1.0));
  CHECK(curve_length(flat, {vec({0.1, 0.1}), vec({0.1, 0.1})}) == 0.0);
  CHECK_THROWS(curve_length(flat, std::vector<Vector>{vec({0, 0})}));

  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const Trajectory tr = integrate_geodesic(sphere, {vec({0, 0}), vec({1, 0})}, 0.5);
  CHECK(curve_length(sphere, tr) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("short geodesics are not beaten by the mesh") {
  std::mt19937_64 rng(101);
  for (const char* name : {"flat", "hemisphere", "vee"}) {
    const GraphSurface s = make_catalog_surface(name);
    const MeshGeodesicOracle o = build_mesh_oracle(s, 128);
    for (const Trajectory& tr : random_short_geodesics(s, 4, rng)) {
      REQUIRE(tr.exit_reason == ExitReason::Completed);
      const MinimalityReport r = minimality_report(s, tr, o);
      CHECK(r.holds());
      CHECK(r.margin == doctest::Approx(r.mesh_length + r.error_budget - r.geodesic_length));
      CHECK(r.error_budget >= 0.0);
    }
  }
}

TEST_CASE("a detour is flagged") {
  // Half a circle of radius 0.3 is longer than the straight chord it spans.
  const GraphSurface flat = make_catalog_surface("flat");
  const MeshGeodesicOracle o = build_mesh_oracle(flat, 128);
  Trajectory tr;
  for (int k = 0; k <= 200; ++k) {
    const double a = std::numbers::pi * k / 200;
    tr.times.push_back(a);
    tr.states.push_back({vec({0.3 * std::cos(a), 0.3 * std::sin(a)}), vec({0, 0})});
  }
  CHECK(curve_length(flat, tr) == doctest::Approx(0.3 * std::numbers::pi).epsilon(1e-4));
  CHECK(minimality_margin(flat, tr, o) < 0.0);
  Trajectory cut = tr;
  cut.exit_reason = ExitReason::LeftChart;
  CHECK_THROWS_AS(minimality_margin(flat, cut, o), OutOfDomain);
}

TEST_CASE("random short geodesics respect the length cap") {
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const double c = sampled_curvature_bound(sphere);
  CHECK(c == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sampled_curvature_bound(make_catalog_surface("flat")) == 0.0);
  const double cap = 0.5 * std::min(std::numbers::pi / c, sphere.domain().inradius());
  std::mt19937_64 rng(103);
  for (const Trajectory& tr : random_short_geodesics(sphere, 10, rng)) {
    CHECK(tr.t_final() <= cap + 1e-12);
    CHECK(tr.t_final() >= 0.3 * cap - 1e-12);
    CHECK(tr.speed == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("branching check on the vee crease") {
  const GraphSurface vee = make_catalog_surface("vee");
  std::vector<Vector> perturbations;
  std::mt19937_64 rng(107);
  for (int k = 0; k < 5; ++k) perturbations.push_back(1e-4 * test::random_unit(4, rng));
  const BranchingReport r =
      branching_check(vee, {vec({-0.1, 0.0}), vec({1.0, 0.0})}, 0.3, {1e-3, 5e-4, 2.5e-4}, perturbations);
  CHECK(r.endpoints.size() == 3);
  CHECK(r.spreads.size() == 2);
  CHECK(r.spread_shrinks);
  CHECK(r.quotients.size() == 5);
  CHECK(r.quotients_bounded);
  CHECK(r.bound == doctest::Approx(std::exp(r.c_bar * 0.3)));
}
