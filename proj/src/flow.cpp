#include "geoflow/flow.hpp"

#include "geoflow/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace geoflow {

Vector TangentVector::stacked() const {
  Vector s(x.size() + y.size());
  s << x, y;
  return s;
}

TangentVector TangentVector::from_stacked(const Vector& s) {
  const Eigen::Index m = s.size() / 2;
  return {s.head(m), s.segment(m, m)};
}

ResolvedTolerances resolve_tolerances(const GraphSurface& surface, const FlowOptions& opts) {
  const Regularity& reg = surface.regularity();
  ResolvedTolerances r{1e-10, 1e-12, std::numeric_limits<double>::infinity()};
  // C2 and C2alpha keep rel 1e-10: at 1e-8 the error estimator misses the
  // third-derivative singularity and the speed drifts by ~5e-7.
  if (reg.cls == RegularityClass::C11) {
    r.rel_tol = 1e-8;
    r.max_step = 1e-3 * surface.domain().min_width();
  }
  if (opts.rel_tol) r.rel_tol = *opts.rel_tol;
  if (opts.abs_tol) r.abs_tol = *opts.abs_tol;
  if (opts.max_step) r.max_step = *opts.max_step;
  return r;
}

AdaptiveOptions adaptive_options(const GraphSurface& surface, const FlowOptions& opts) {
  const ResolvedTolerances r = resolve_tolerances(surface, opts);
  AdaptiveOptions a;
  a.rel_tol = r.rel_tol;
  a.abs_tol = r.abs_tol;
  a.max_step = r.max_step;
  return a;
}

double g_inner(const GraphSurface& surface, const Vector& x, const Vector& u, const Vector& v) {
  const Matrix g = metric_at(surface, x).g;
  return u.dot(g * v);
}

double g_norm(const GraphSurface& surface, const Vector& x, const Vector& y) {
  return std::sqrt(std::max(0.0, g_inner(surface, x, y, y)));
}

PhaseState geodesic_rhs(const GraphSurface& surface, const PhaseState& s) {
  const ChristoffelSymbols gamma = christoffel_at(surface, s.x);
  return {s.y, -gamma.contract(s.y, s.y)};
}

double Trajectory::speed_drift(const GraphSurface& surface) const {
  if (speed == 0.0) return 0.0;
  double worst = 0.0;
  for (const PhaseState& s : states) {
    worst = std::max(worst, std::abs(g_norm(surface, s.x, s.y) - speed) / speed);
  }
  return worst;
}

PhaseState Trajectory::at(double t) const { return TangentVector::from_stacked(raw.interpolate(t)); }

Trajectory integrate_geodesic(const GraphSurface& surface, const TangentVector& v, double t_end,
                              const FlowOptions& opts) {
  if (v.x.size() != surface.dim() || v.y.size() != surface.dim()) {
    throw Error("integrate_geodesic: tangent vector has the wrong dimension");
  }
  if (t_end < 0) throw Error("integrate_geodesic: t_end must be nonnegative");
  surface.require_in_chart(v.x);
  const int m = surface.dim();
  const OdeRhs rhs = [&surface, m](double, const Vector& s, Vector& ds) {
    const Vector x = s.head(m);
    const Vector y = s.tail(m);
    const ChristoffelSymbols gamma = christoffel_at(surface, x);
    ds.resize(2 * m);
    ds.head(m) = y;
    ds.tail(m) = -gamma.contract(y, y);
  };
  Trajectory traj;
  if (opts.method == StepMethod::FixedRK4) {
    traj.raw = integrate_rk4(rhs, 0.0, v.stacked(), t_end, opts.fixed_step);
  } else {
    traj.raw = integrate_adaptive(rhs, 0.0, v.stacked(), t_end, adaptive_options(surface, opts));
  }
  traj.exit_reason = traj.raw.exit;
  traj.times = traj.raw.times;
  traj.states.reserve(traj.raw.states.size());
  for (const Vector& s : traj.raw.states) traj.states.push_back(TangentVector::from_stacked(s));
  traj.speed = g_norm(surface, v.x, v.y);
  return traj;
}

TangentVector geodesic_flow(const GraphSurface& surface, double t, const TangentVector& v,
                            const FlowOptions& opts) {
  if (!surface.contains(v.x)) throw OutOfDomain("geodesic_flow: base point outside the chart");
  if (t == 0.0) return v;
  if (t < 0) {
    TangentVector back = geodesic_flow(surface, -t, {v.x, -v.y}, opts);
    back.y = -back.y;
    return back;
  }
  const Trajectory traj = integrate_geodesic(surface, v, t, opts);
  if (traj.exit_reason != ExitReason::Completed) {
    throw OutOfDomain("geodesic_flow: geodesic stops at t = " + std::to_string(traj.t_final()) + " (" +
                      exit_reason_name(traj.exit_reason) + ") before t = " + std::to_string(t));
  }
  return traj.final_state();
}

Vector exp_map(const GraphSurface& surface, const TangentVector& v, const FlowOptions& opts) {
  return geodesic_flow(surface, 1.0, v, opts).x;
}

double flow_property_residual(const GraphSurface& surface, double s, double t, const TangentVector& v,
                              const FlowOptions& opts) {
  if (s == 0.0) return 0.0;
  const TangentVector direct = geodesic_flow(surface, s + t, v, opts);
  const TangentVector composed = geodesic_flow(surface, s, geodesic_flow(surface, t, v, opts), opts);
  return (direct.stacked() - composed.stacked()).norm();
}

void write_trajectory_csv(std::ostream& out, const GraphSurface& surface, const Trajectory& traj) {
  const int m = surface.dim();
  out << "t";
  for (int i = 1; i <= m; ++i) out << ",x" << i;
  for (int i = 1; i <= m; ++i) out << ",y" << i;
  out << ",speed\n";
  char buf[40];
  const auto put = [&](double d) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const PhaseState& s = traj.states[k];
    put(traj.times[k]);
    for (int i = 0; i < m; ++i) {
      out << ',';
      put(s.x[i]);
    }
    for (int i = 0; i < m; ++i) {
      out << ',';
      put(s.y[i]);
    }
    out << ',';
    put(g_norm(surface, s.x, s.y));
    out << '\n';
  }
}

}  // namespace geoflow
