#pragma once

#include "geoflow/flow.hpp"

#include <vector>

namespace geoflow {

// J in chart components, K = covariant derivative of J in chart components.
struct JacobiState {
  Vector J;
  Vector K;

  Vector stacked() const;
  static JacobiState from_stacked(const Vector& s);
};

struct JointDerivative {
  PhaseState phase;
  JacobiState jacobi;
};

// Geodesic right-hand side plus J' = K - Gamma(y, J), K' = A J - Gamma(y, K),
// with A the curvature operator along y.
JointDerivative joint_rhs(const GraphSurface& surface, const PhaseState& phase, const JacobiState& jac);

// 2m x 2m matrix R of the linear part, (J, K)' = R (J, K).
Matrix jacobi_coefficients(const GraphSurface& surface, const PhaseState& phase);

struct JacobiOptions {
  FlowOptions flow;
  // Integrate the geodesic first and the Jacobi equation along its dense
  // output afterwards, instead of one joint system.
  bool two_pass = false;
};

struct JacobiPath {
  std::vector<double> times;
  std::vector<PhaseState> phase;
  std::vector<JacobiState> jacobi;
  ExitReason exit_reason = ExitReason::Completed;
};

// Full sampled solution; stops early (exit_reason != Completed) at chart exit.
JacobiPath jacobi_path(const GraphSurface& surface, const TangentVector& v, const JacobiState& j0,
                       double t_end, const JacobiOptions& opts = {});

// (J, K) at t_end; negative t_end runs the reversed geodesic. Throws OutOfDomain.
// Outside two-pass mode this is flow_differential(...) * j0, hence exactly linear in j0.
JacobiState propagate_jacobi(const GraphSurface& surface, const TangentVector& v, const JacobiState& j0,
                             double t_end, const JacobiOptions& opts = {});

struct FlowDifferential {
  Matrix matrix;
  double t = 0.0;
  TangentVector v;
  TangentVector end;
};

// Columns are the propagations of the 2m standard basis initial conditions.
FlowDifferential flow_differential(const GraphSurface& surface, double t, const TangentVector& v,
                                   const JacobiOptions& opts = {});

struct FdOptions {
  double eps = 1e-5;
  // 0: pick from regularity (4 for C3 and better, 2 otherwise)
  int order = 0;
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
};

// Central differences of the flow in chart coordinates, converted to (J, K)
// coordinates with the Christoffel symbols at both ends.
Matrix fd_flow_differential(const GraphSurface& surface, double t, const TangentVector& v,
                            const FdOptions& opts = {});

// tau(t, s) = exp(t (v + s w)): compares d/ds of the exact velocity with
// d/dt of d/ds of the positions, both by central differences of step eps,
// over t in {0.5, 1}. w is a variation of the stacked (x, y) initial state.
double mixed_partials_residual(const GraphSurface& surface, const TangentVector& v, const Vector& w,
                               double eps, double rk4_step = 1e-3);

}  // namespace geoflow
