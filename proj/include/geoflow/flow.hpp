#pragma once

#include "geoflow/ode.hpp"
#include "geoflow/surface.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace geoflow {

// Chart point x with chart velocity y.
struct TangentVector {
  Vector x;
  Vector y;

  Vector stacked() const;
  static TangentVector from_stacked(const Vector& s);
};

using PhaseState = TangentVector;

enum class StepMethod { Adaptive, FixedRK4 };

// Unset tolerances are filled from the surface's regularity class.
struct FlowOptions {
  StepMethod method = StepMethod::Adaptive;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_step;
  double fixed_step = 1e-3;
};

struct ResolvedTolerances {
  double rel_tol;
  double abs_tol;
  double max_step;
};

ResolvedTolerances resolve_tolerances(const GraphSurface& surface, const FlowOptions& opts);
AdaptiveOptions adaptive_options(const GraphSurface& surface, const FlowOptions& opts);

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  ExitReason exit_reason = ExitReason::Completed;
  double speed = 0.0;  // g-norm of the initial velocity
  OdeSolution raw;     // stacked (x, y) states with derivatives, for dense output

  const PhaseState& final_state() const { return states.back(); }
  double t_final() const { return times.back(); }
  // max |speed(t) - speed| / speed over the samples (0 for zero speed)
  double speed_drift(const GraphSurface& surface) const;
  PhaseState at(double t) const;
};

// sqrt(y^T g(x) y)
double g_norm(const GraphSurface& surface, const Vector& x, const Vector& y);
double g_inner(const GraphSurface& surface, const Vector& x, const Vector& u, const Vector& v);

// (y, -Gamma(y, y))
PhaseState geodesic_rhs(const GraphSurface& surface, const PhaseState& s);

// Integrates up to t_end >= 0 or until the chart is left.
Trajectory integrate_geodesic(const GraphSurface& surface, const TangentVector& v, double t_end,
                              const FlowOptions& opts = {});

// phi(t, v); negative t integrates the reversed velocity. Throws OutOfDomain
// when the geodesic does not stay in the chart up to time t.
TangentVector geodesic_flow(const GraphSurface& surface, double t, const TangentVector& v,
                            const FlowOptions& opts = {});

Vector exp_map(const GraphSurface& surface, const TangentVector& v, const FlowOptions& opts = {});

// |phi(s + t, v) - phi(s, phi(t, v))| in stacked chart coordinates.
double flow_property_residual(const GraphSurface& surface, double s, double t, const TangentVector& v,
                              const FlowOptions& opts = {});

// Header t,x1..xm,y1..ym,speed; %.17g.
void write_trajectory_csv(std::ostream& out, const GraphSurface& surface, const Trajectory& traj);

}  // namespace geoflow
