#pragma once

#include "geoflow/domain.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace geoflow {

enum class ExitReason { Completed, LeftChart, StepFailure };

const char* exit_reason_name(ExitReason r);

// Right-hand side y' = f(t, y). May throw OutOfChart, which the integrators
// treat as the solution leaving the region where f is defined.
using OdeRhs = std::function<void(double t, const Vector& y, Vector& dy)>;

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0: pick automatically
  double min_step = 1e-14;
  std::size_t max_steps = 2'000'000;
  // Resolution of the chart-exit time.
  double exit_resolution = 1e-11;
  // Optional per-component weights for the error norm (empty = all ones).
  std::vector<double> error_weights;
};

struct OdeSolution {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> derivatives;
  ExitReason exit = ExitReason::Completed;
  std::size_t rejected = 0;

  double t_final() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }

  // Cubic Hermite interpolation between accepted steps.
  Vector interpolate(double t) const;
};

// Dormand-Prince 5(4) with PI step control, integrating forward from t0 to t_end.
OdeSolution integrate_adaptive(const OdeRhs& f, double t0, const Vector& y0, double t_end,
                               const AdaptiveOptions& opts = {});

// Classical RK4 with constant step h (last step shortened to land on t_end).
OdeSolution integrate_rk4(const OdeRhs& f, double t0, const Vector& y0, double t_end, double h,
                          double exit_resolution = 1e-11);

}  // namespace geoflow
