#include "geoflow/errors.hpp"
#include "geoflow/jacobi.hpp"
#include "support.hpp"

using namespace geoflow;
using geoflow::test::vec;

TEST_CASE("flat Jacobi fields are affine") {
  const GraphSurface flat = make_catalog_surface("flat");
  const TangentVector v{vec({0.1, 0.2}), vec({0.3, -0.1})};
  const JacobiState j = propagate_jacobi(flat, v, {vec({1, 2}), vec({-0.5, 0.25})}, 0.7);
  CHECK(test::max_abs(j.J - vec({1 - 0.35, 2 + 0.175})) < 1e-13);
  CHECK(test::max_abs(j.K - vec({-0.5, 0.25})) < 1e-13);
}

TEST_CASE("sphere Jacobi field has length sin t") {
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const TangentVector v{vec({0, 0}), vec({1, 0})};
  const JacobiPath path = jacobi_path(sphere, v, {vec({0, 0}), vec({0, 1})}, 0.9);
  REQUIRE(path.exit_reason == ExitReason::Completed);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double len = g_norm(sphere, path.phase[k].x, path.jacobi[k].J);
    CHECK(len == doctest::Approx(std::sin(path.times[k])).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("tangential field t * velocity") {
  std::mt19937_64 rng(43);
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    const Vector x = test::random_point(s.domain(), rng, 0.3);
    Vector y = test::random_unit(2, rng);
    y /= g_norm(s, x, y);
    const double t = 0.4;
    const JacobiState j = propagate_jacobi(s, {x, y}, {Vector::Zero(2), y}, t);
    const TangentVector end = geodesic_flow(s, t, {x, y});
    CHECK(test::max_abs(j.J - t * end.y) < 1e-8);
    CHECK(test::max_abs(j.K - end.y) < 1e-8);
    CHECK(g_norm(s, end.x, j.J) == doctest::Approx(t).epsilon(1e-8));
  }
}

TEST_CASE("documented Jacobi derivative values") {
  const GraphSurface flat = make_catalog_surface("flat");
  const PhaseState p{vec({0.1, 0.2}), vec({0.3, 0.4})};
  const JointDerivative d = joint_rhs(flat, p, {vec({1, 2}), vec({3, 4})});
  CHECK(test::max_abs(d.jacobi.stacked() - vec({3, 4, 0, 0})) == 0.0);
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const JointDerivative e = joint_rhs(sphere, {vec({0, 0}), vec({1, 0})}, {vec({0, 1}), vec({0, 0})});
  CHECK(test::max_abs(e.jacobi.K - vec({0, -1})) < 1e-15);
  const JointDerivative z = joint_rhs(sphere, {vec({0.2, 0.1}), vec({1, 0})}, {vec({0, 0}), vec({0, 0})});
  CHECK(test::max_abs(z.jacobi.stacked()) == 0.0);
}

TEST_CASE("sphere Jacobi field at t = 0.5") {
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const TangentVector v{vec({0, 0}), vec({1, 0})};
  const JacobiState j = propagate_jacobi(sphere, v, {vec({0, 0}), vec({0, 1})}, 0.5);
  const Vector x = geodesic_flow(sphere, 0.5, v).x;
  CHECK(g_norm(sphere, x, j.J) == doctest::Approx(0.479425538604203).epsilon(1e-9));
  CHECK(g_norm(sphere, x, j.K) == doctest::Approx(0.877582561890373).epsilon(1e-9));
  const FlowDifferential d = flow_differential(sphere, 0.5, v);
  const Vector jk = d.matrix.topRightCorner(2, 2) * vec({0, 1});
  CHECK(g_norm(sphere, d.end.x, jk) == doctest::Approx(std::sin(0.5)).epsilon(1e-9));
}

TEST_CASE("coefficient matrix layout") {
  const GraphSurface s = make_catalog_surface("hemisphere");
  const PhaseState p{vec({0.2, -0.1}), vec({0.5, 0.4})};
  const Matrix r = jacobi_coefficients(s, p);
  const Matrix gy = christoffel_at(s, p.x).along(p.y);
  const Matrix a = curvature_operator(s, p.x, p.y);
  CHECK(test::max_abs(r.topLeftCorner(2, 2) + gy) < 1e-15);
  CHECK(test::max_abs(r.topRightCorner(2, 2) - Matrix::Identity(2, 2)) == 0.0);
  CHECK(test::max_abs(r.bottomLeftCorner(2, 2) - a) < 1e-15);
  CHECK(test::max_abs(r.bottomRightCorner(2, 2) + gy) < 1e-15);

  const JacobiState j{vec({0.3, 0.7}), vec({-0.2, 0.1})};
  const JointDerivative d = joint_rhs(s, p, j);
  CHECK(test::max_abs(d.jacobi.stacked() - r * j.stacked()) < 1e-14);
  CHECK(test::max_abs(d.phase.x - p.y) == 0.0);
}

TEST_CASE("propagation is linear in the initial data") {
  std::mt19937_64 rng(45);
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    const TangentVector v{test::random_point(s.domain(), rng, 0.3), 0.8 * test::random_unit(2, rng)};
    const JacobiState a{test::random_unit(2, rng), test::random_unit(2, rng)};
    const JacobiState b{test::random_unit(2, rng), test::random_unit(2, rng)};
    const double alpha = 0.7, beta = -1.3;
    const JacobiState ab{alpha * a.J + beta * b.J, alpha * a.K + beta * b.K};
    const Vector lhs = propagate_jacobi(s, v, ab, 0.5).stacked();
    const Vector rhs =
        alpha * propagate_jacobi(s, v, a, 0.5).stacked() + beta * propagate_jacobi(s, v, b, 0.5).stacked();
    CHECK(test::max_abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("flow differential satisfies the cocycle identity") {
  std::mt19937_64 rng(47);
  for (const char* name : {"hemisphere", "trough", "c21_cubic", "vee"}) {
    const GraphSurface s = make_catalog_surface(name);
    const TangentVector v{test::random_point(s.domain(), rng, 0.3), 0.5 * test::random_unit(2, rng)};
    const double t = 0.25, u = 0.2;
    const FlowDifferential dt = flow_differential(s, t, v);
    const FlowDifferential du = flow_differential(s, u, dt.end);
    const FlowDifferential dtu = flow_differential(s, t + u, v);
    CHECK(test::max_abs(du.matrix * dt.matrix - dtu.matrix) < 1e-7);
  }
}

TEST_CASE("closed-form differentials") {
  const GraphSurface s = make_catalog_surface("hemisphere");
  const FlowDifferential d = flow_differential(s, 0.0, {vec({0.1, 0.1}), vec({1, 0})});
  CHECK(test::max_abs(d.matrix - Matrix::Identity(4, 4)) == 0.0);

  const GraphSurface flat = make_catalog_surface("flat");
  Matrix shear = Matrix::Identity(4, 4);
  shear.topRightCorner(2, 2) = Matrix::Identity(2, 2);
  const TangentVector v{vec({0.1, -0.2}), vec({0.3, 0.2})};
  CHECK(test::max_abs(flow_differential(flat, 1.0, v).matrix - shear) < 1e-14);
  FdOptions o;
  o.eps = 1e-5;
  CHECK(test::max_abs(fd_flow_differential(flat, 1.0, v, o) - shear) < 1e-9);
}

TEST_CASE("flow differential matches finite differences") {
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  const TangentVector pole{vec({0, 0}), vec({1, 0})};
  CHECK(test::max_abs(flow_differential(sphere, 0.5, pole).matrix - fd_flow_differential(sphere, 0.5, pole)) < 1e-6);

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> time(0.1, 0.5);
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    if (!s.regularity().at_least(RegularityClass::C2)) continue;
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
      const TangentVector v{test::random_point(s.domain(), rng, 0.3), 0.7 * test::random_unit(2, rng)};
      const double t = time(rng);
      worst = std::max(worst, test::max_abs(flow_differential(s, t, v).matrix - fd_flow_differential(s, t, v)));
    }
    CHECK_MESSAGE(worst < 1e-5, name);
  }
}

TEST_CASE("second-order differences converge quadratically") {
  std::mt19937_64 rng(55);
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    if (!s.regularity().at_least(RegularityClass::C3)) continue;
    const TangentVector v{test::random_point(s.domain(), rng, 0.3), 0.7 * test::random_unit(2, rng)};
    const Matrix exact = flow_differential(s, 0.5, v).matrix;
    FdOptions o;
    o.order = 2;
    o.eps = 1e-3;
    const double e1 = test::max_abs(fd_flow_differential(s, 0.5, v, o) - exact);
    o.eps = 1e-4;
    const double e2 = test::max_abs(fd_flow_differential(s, 0.5, v, o) - exact);
    if (e1 < 1e-11) continue;  // the flat case is exact at both steps
    CHECK_MESSAGE(e1 / e2 == doctest::Approx(100.0).epsilon(0.2), name);
  }
}

TEST_CASE("one-pass and two-pass propagation agree") {
  const GraphSurface s = make_catalog_surface("trough");
  const TangentVector v{vec({0.1, 0.3}), vec({0.8, -0.2})};
  const JacobiState j0{vec({0.2, 0.1}), vec({0.0, 1.0})};
  JacobiOptions two;
  two.two_pass = true;
  CHECK(test::max_abs(propagate_jacobi(s, v, j0, 0.6).stacked() - propagate_jacobi(s, v, j0, 0.6, two).stacked()) <
        1e-7);
}

TEST_CASE("propagation past the chart boundary") {
  const GraphSurface s = make_catalog_surface("hemisphere");
  CHECK_THROWS_AS(propagate_jacobi(s, {vec({0, 0}), vec({1, 0})}, {vec({0, 0}), vec({0, 1})}, 2.0), OutOfDomain);
  const JacobiPath p = jacobi_path(s, {vec({0, 0}), vec({1, 0})}, {vec({0, 0}), vec({0, 1})}, 2.0);
  CHECK(p.exit_reason == ExitReason::LeftChart);
}

TEST_CASE("mixed partials commute") {
  const GraphSurface flat = make_catalog_surface("flat");
  const TangentVector v{vec({0, 0}), vec({0.4, 0.0})};
  CHECK(mixed_partials_residual(flat, v, vec({0, 0, 0, 1}), 1e-3) < 1e-10);
  const GraphSurface sphere = make_catalog_surface("hemisphere");
  CHECK(mixed_partials_residual(sphere, {vec({0.1, 0}), vec({0.3, 0.2})}, vec({0, 0.6, 0.8, 0}), 1e-4) < 1e-6);
}
