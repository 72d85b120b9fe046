#include "geoflow/jacobi.hpp"

#include "geoflow/errors.hpp"

#include <cmath>
#include <string>

namespace geoflow {

Vector JacobiState::stacked() const {
  Vector s(J.size() + K.size());
  s << J, K;
  return s;
}

JacobiState JacobiState::from_stacked(const Vector& s) {
  const Eigen::Index m = s.size() / 2;
  return {s.head(m), s.segment(m, m)};
}

Matrix jacobi_coefficients(const GraphSurface& surface, const PhaseState& phase) {
  const PointGeometry pg(surface, phase.x);
  const int m = pg.dim();
  const Matrix gy = pg.christoffel().along(phase.y);
  Matrix r(2 * m, 2 * m);
  r << -gy, Matrix::Identity(m, m), pg.curvature_operator(phase.y), -gy;
  return r;
}

JointDerivative joint_rhs(const GraphSurface& surface, const PhaseState& phase, const JacobiState& jac) {
  const PointGeometry pg(surface, phase.x);
  const ChristoffelSymbols& gamma = pg.christoffel();
  JointDerivative d;
  d.phase = {phase.y, -gamma.contract(phase.y, phase.y)};
  d.jacobi.J = jac.K - gamma.contract(phase.y, jac.J);
  d.jacobi.K = pg.curvature_operator(phase.y) * jac.J - gamma.contract(phase.y, jac.K);
  return d;
}

namespace {

void check_inputs(const GraphSurface& surface, const TangentVector& v) {
  if (v.x.size() != surface.dim() || v.y.size() != surface.dim()) {
    throw Error("tangent vector has the wrong dimension");
  }
  if (!surface.contains(v.x)) throw OutOfDomain("base point outside the chart");
}

OdeSolution run(const GraphSurface& surface, const OdeRhs& rhs, const Vector& y0, double t_end,
                const FlowOptions& opts) {
  if (opts.method == StepMethod::FixedRK4) return integrate_rk4(rhs, 0.0, y0, t_end, opts.fixed_step);
  return integrate_adaptive(rhs, 0.0, y0, t_end, adaptive_options(surface, opts));
}

}  // namespace

JacobiPath jacobi_path(const GraphSurface& surface, const TangentVector& v, const JacobiState& j0,
                       double t_end, const JacobiOptions& opts) {
  check_inputs(surface, v);
  if (t_end < 0) throw Error("jacobi_path: t_end must be nonnegative");
  const int m = surface.dim();
  JacobiPath path;
  if (!opts.two_pass) {
    const OdeRhs rhs = [&surface, m](double, const Vector& s, Vector& ds) {
      const JointDerivative d = joint_rhs(surface, {s.head(m), s.segment(m, m)},
                                          {s.segment(2 * m, m), s.segment(3 * m, m)});
      ds.resize(4 * m);
      ds << d.phase.x, d.phase.y, d.jacobi.J, d.jacobi.K;
    };
    Vector y0(4 * m);
    y0 << v.x, v.y, j0.J, j0.K;
    const OdeSolution sol = run(surface, rhs, y0, t_end, opts.flow);
    path.exit_reason = sol.exit;
    path.times = sol.times;
    for (const Vector& s : sol.states) {
      path.phase.push_back({s.head(m), s.segment(m, m)});
      path.jacobi.push_back({s.segment(2 * m, m), s.segment(3 * m, m)});
    }
    return path;
  }

  const Trajectory geo = integrate_geodesic(surface, v, t_end, opts.flow);
  const double t_stop = geo.t_final();
  const OdeRhs rhs = [&surface, &geo](double t, const Vector& s, Vector& ds) {
    ds = jacobi_coefficients(surface, geo.at(t)) * s;
  };
  FlowOptions lin = opts.flow;
  // The path is only known on the accepted steps of the first pass.
  if (!lin.max_step && lin.method == StepMethod::Adaptive) lin.max_step = t_stop / 8.0;
  const OdeSolution sol = run(surface, rhs, j0.stacked(), t_stop, lin);
  path.exit_reason = geo.exit_reason;
  path.times = sol.times;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    path.phase.push_back(geo.at(sol.times[i]));
    path.jacobi.push_back(JacobiState::from_stacked(sol.states[i]));
  }
  return path;
}

JacobiState propagate_jacobi(const GraphSurface& surface, const TangentVector& v, const JacobiState& j0,
                             double t_end, const JacobiOptions& opts) {
  check_inputs(surface, v);
  if (t_end == 0.0) return j0;
  if (t_end < 0) {
    JacobiState back = propagate_jacobi(surface, {v.x, -v.y}, {j0.J, -j0.K}, -t_end, opts);
    back.K = -back.K;
    return back;
  }
  if (!opts.two_pass) {
    // Through the full matrix, so the step sequence does not depend on j0.
    const FlowDifferential d = flow_differential(surface, t_end, v, opts);
    return JacobiState::from_stacked(d.matrix * j0.stacked());
  }
  const JacobiPath path = jacobi_path(surface, v, j0, t_end, opts);
  if (path.exit_reason != ExitReason::Completed) {
    throw OutOfDomain("propagate_jacobi: geodesic stops at t = " + std::to_string(path.times.back()) +
                      " before t = " + std::to_string(t_end));
  }
  return path.jacobi.back();
}

FlowDifferential flow_differential(const GraphSurface& surface, double t, const TangentVector& v,
                                   const JacobiOptions& opts) {
  check_inputs(surface, v);
  const int m = surface.dim();
  const int n = 2 * m;
  FlowDifferential fd;
  fd.t = t;
  fd.v = v;
  if (t == 0.0) {
    fd.matrix = Matrix::Identity(n, n);
    fd.end = v;
    return fd;
  }
  if (t < 0) {
    FlowDifferential back = flow_differential(surface, -t, {v.x, -v.y}, opts);
    Matrix flip = Matrix::Identity(n, n);
    flip.bottomRightCorner(m, m) *= -1.0;
    fd.matrix = flip * back.matrix * flip;
    fd.end = {back.end.x, -back.end.y};
    return fd;
  }
  if (opts.two_pass) {
    fd.matrix.resize(n, n);
    for (int k = 0; k < n; ++k) {
      const JacobiState col = propagate_jacobi(surface, v, JacobiState::from_stacked(Vector::Unit(n, k)), t, opts);
      fd.matrix.col(k) = col.stacked();
    }
    fd.end = geodesic_flow(surface, t, v, opts.flow);
    return fd;
  }
  const OdeRhs rhs = [&surface, m, n](double, const Vector& s, Vector& ds) {
    const Vector x = s.head(m);
    const Vector y = s.segment(m, m);
    const PointGeometry pg(surface, x);
    const Matrix gy = pg.christoffel().along(y);
    const Matrix a = pg.curvature_operator(y);
    const Eigen::Map<const Matrix> M(s.data() + n, n, n);
    ds.resize(s.size());
    ds.head(m) = y;
    ds.segment(m, m) = -gy * y;
    Eigen::Map<Matrix> dM(ds.data() + n, n, n);
    dM.topRows(m) = -gy * M.topRows(m) + M.bottomRows(m);
    dM.bottomRows(m) = a * M.topRows(m) - gy * M.bottomRows(m);
  };
  Vector y0(n + n * n);
  y0.head(n) = v.stacked();
  Eigen::Map<Matrix>(y0.data() + n, n, n).setIdentity();
  const OdeSolution sol = run(surface, rhs, y0, t, opts.flow);
  if (sol.exit != ExitReason::Completed) {
    throw OutOfDomain("flow_differential: geodesic stops at t = " + std::to_string(sol.t_final()) +
                      " before t = " + std::to_string(t));
  }
  const Vector& s = sol.final_state();
  fd.end = TangentVector::from_stacked(s.head(n));
  fd.matrix = Eigen::Map<const Matrix>(s.data() + n, n, n);
  return fd;
}

namespace {

// (dx, dy) -> (J, K) at a phase point.
Matrix chart_to_jacobi(const GraphSurface& surface, const PhaseState& p) {
  const int m = surface.dim();
  Matrix c = Matrix::Identity(2 * m, 2 * m);
  c.bottomLeftCorner(m, m) = christoffel_at(surface, p.x).along(p.y);
  return c;
}

}  // namespace

Matrix fd_flow_differential(const GraphSurface& surface, double t, const TangentVector& v,
                            const FdOptions& opts) {
  check_inputs(surface, v);
  const int m = surface.dim();
  const int n = 2 * m;
  const int order = opts.order != 0 ? opts.order
                    : surface.regularity().at_least(RegularityClass::C3) ? 4
                                                                          : 2;
  if (order != 2 && order != 4) throw ConfigError("fd_flow_differential: order must be 2 or 4");
  FlowOptions fo;
  fo.rel_tol = opts.rel_tol;
  fo.abs_tol = opts.abs_tol;

  const TangentVector end = geodesic_flow(surface, t, v, fo);
  const Matrix start_inv = chart_to_jacobi(surface, v).inverse();
  const Vector base = v.stacked();
  const auto flow_at = [&](const Vector& dir, double h) {
    return geodesic_flow(surface, t, TangentVector::from_stacked(base + h * dir), fo).stacked();
  };
  Matrix chart(n, n);
  const double e = opts.eps;
  for (int k = 0; k < n; ++k) {
    const Vector dir = start_inv.col(k);
    if (order == 2) {
      chart.col(k) = (flow_at(dir, e) - flow_at(dir, -e)) / (2 * e);
    } else {
      chart.col(k) =
          (-flow_at(dir, 2 * e) + 8.0 * flow_at(dir, e) - 8.0 * flow_at(dir, -e) + flow_at(dir, -2 * e)) /
          (12 * e);
    }
  }
  return chart_to_jacobi(surface, end) * chart;
}

double mixed_partials_residual(const GraphSurface& surface, const TangentVector& v, const Vector& w,
                               double eps, double rk4_step) {
  check_inputs(surface, v);
  const int m = surface.dim();
  if (w.size() != 2 * m) throw Error("mixed_partials_residual: variation must have size 2m");
  FlowOptions fo;
  fo.method = StepMethod::FixedRK4;
  fo.fixed_step = rk4_step;
  const Vector base = v.stacked();
  const auto state = [&](double t, double s) {
    return geodesic_flow(surface, t, TangentVector::from_stacked(base + s * w), fo);
  };
  const auto velocity = [&](const PhaseState& p) -> Vector { return PointGeometry(surface, p.x).tangent_frame() * p.y; };
  const auto position = [&](double t, double s) { return embed(surface, state(t, s).x); };

  double worst = 0.0;
  for (double t : {0.5, 1.0}) {
    const Vector ds_dt = (velocity(state(t, eps)) - velocity(state(t, -eps))) / (2 * eps);
    const Vector ds_plus = (position(t + eps, eps) - position(t + eps, -eps)) / (2 * eps);
    const Vector ds_minus = (position(t - eps, eps) - position(t - eps, -eps)) / (2 * eps);
    const Vector dt_ds = (ds_plus - ds_minus) / (2 * eps);
    worst = std::max(worst, (ds_dt - dt_ds).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace geoflow
