#include "geoflow/ode.hpp"

#include "geoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace geoflow {

const char* exit_reason_name(ExitReason r) {
  switch (r) {
    case ExitReason::Completed:
      return "Completed";
    case ExitReason::LeftChart:
      return "LeftChart";
    case ExitReason::StepFailure:
      return "StepFailure";
  }
  return "?";
}

Vector OdeSolution::interpolate(double t) const {
  if (times.empty()) throw Error("interpolate: empty solution");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double h = times[i + 1] - times[i];
  const double s = (t - times[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * states[i] + h10 * h * derivatives[i] + h01 * states[i + 1] + h11 * h * derivatives[i + 1];
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  Vector y;
  Vector dy;
  double err = 0.0;
};

class DormandPrince {
 public:
  DormandPrince(const OdeRhs& f, const AdaptiveOptions& o) : f_(f), o_(o) {}

  double norm(const Vector& e, const Vector& y0, const Vector& y1) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const double sc = o_.abs_tol + o_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      double r = e[i] / sc;
      if (!o_.error_weights.empty()) r *= o_.error_weights[i];
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(e.size()));
  }

  // Throws OutOfChart when any stage leaves the region.
  StepResult step(double t, const Vector& y, const Vector& k1, double h) const {
    Vector k2, k3, k4, k5, k6, k7;
    Vector tmp = y + h * a21 * k1;
    f_(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f_(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f_(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f_(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f_(t + h, tmp, k6);
    StepResult r;
    r.y = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f_(t + h, r.y, k7);
    r.dy = k7;
    const Vector e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    r.err = norm(e, y, r.y);
    return r;
  }

  std::optional<StepResult> try_step(double t, const Vector& y, const Vector& k1, double h) const {
    try {
      return step(t, y, k1, h);
    } catch (const OutOfChart&) {
      return std::nullopt;
    }
  }

 private:
  const OdeRhs& f_;
  const AdaptiveOptions& o_;
};

double initial_step(const OdeRhs& f, double t0, const Vector& y0, const Vector& f0,
                    double span, const AdaptiveOptions& o) {
  const auto scaled = [&](const Vector& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double sc = o.abs_tol + o.rel_tol * std::abs(y0[i]);
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  const double dy0 = scaled(y0);
  const double df0 = scaled(f0);
  double h = (dy0 < 1e-5 || df0 < 1e-5) ? 1e-6 : 0.01 * dy0 / df0;
  h = std::min({h, span, o.max_step});
  Vector f1;
  try {
    f(t0 + h, y0 + h * f0, f1);
  } catch (const OutOfChart&) {
    return h * 0.01;
  }
  const double d2 = scaled(f1 - f0) / h;
  const double dmax = std::max(df0, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100 * h, h1, span, o.max_step});
}

}  // namespace

OdeSolution integrate_adaptive(const OdeRhs& f, double t0, const Vector& y0, double t_end,
                               const AdaptiveOptions& opts) {
  OdeSolution sol;
  Vector k1;
  f(t0, y0, k1);
  sol.times.push_back(t0);
  sol.states.push_back(y0);
  sol.derivatives.push_back(k1);
  if (!(t_end > t0)) return sol;

  DormandPrince dp(f, opts);
  constexpr double safety = 0.9, beta = 0.04, fac_min = 0.2, fac_max = 10.0;
  const double expo = 0.2 - beta * 0.75;
  double fac_old = 1e-4;

  double t = t0;
  Vector y = y0;
  double h = opts.initial_step > 0 ? opts.initial_step : initial_step(f, t0, y0, k1, t_end - t0, opts);
  bool last_rejected = false;

  for (std::size_t n = 0; n < opts.max_steps; ++n) {
    if (h < opts.min_step) {
      sol.exit = ExitReason::StepFailure;
      return sol;
    }
    bool finishing = false;
    if (t + h >= t_end || t + 1.01 * h >= t_end) {
      h = t_end - t;
      finishing = true;
    }
    std::optional<StepResult> r = dp.try_step(t, y, k1, h);
    bool exiting = false;
    if (!r) {
      // Bisect on the step size for the longest step that stays in the region.
      double lo = 0.0, hi = h;
      std::optional<StepResult> best;
      while (hi - lo > opts.exit_resolution) {
        const double mid = 0.5 * (lo + hi);
        if (auto m = dp.try_step(t, y, k1, mid)) {
          lo = mid;
          best = std::move(m);
        } else {
          hi = mid;
        }
      }
      if (!best) {
        sol.exit = ExitReason::LeftChart;
        return sol;
      }
      if (best->err <= 1.0) {
        h = lo;
        r = std::move(best);
        exiting = true;
      } else {
        const double fac = std::pow(best->err, 0.2) / safety;
        h = lo / std::min(1.0 / fac_min, fac);
        ++sol.rejected;
        last_rejected = true;
        continue;
      }
    }
    const double err = r->err;
    if (err <= 1.0 || exiting) {
      const double fac11 = std::pow(std::max(err, 1e-300), expo);
      double fac = fac11 / std::pow(fac_old, beta);
      fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safety));
      double h_new = h / fac;
      fac_old = std::max(err, 1e-4);
      t = (finishing && !exiting) ? t_end : t + h;
      y = std::move(r->y);
      k1 = std::move(r->dy);
      sol.times.push_back(t);
      sol.states.push_back(y);
      sol.derivatives.push_back(k1);
      if (exiting) {
        sol.exit = ExitReason::LeftChart;
        return sol;
      }
      if (finishing) return sol;
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = std::min(h_new, opts.max_step);
    } else {
      const double fac11 = std::pow(err, expo);
      h = h / std::min(1.0 / fac_min, fac11 / safety);
      ++sol.rejected;
      last_rejected = true;
    }
  }
  sol.exit = ExitReason::StepFailure;
  return sol;
}

namespace {

std::optional<Vector> rk4_step(const OdeRhs& f, double t, const Vector& y, const Vector& k1, double h,
                               Vector& dy_end) {
  try {
    Vector k2, k3, k4;
    f(t + 0.5 * h, y + 0.5 * h * k1, k2);
    f(t + 0.5 * h, y + 0.5 * h * k2, k3);
    f(t + h, y + h * k3, k4);
    Vector out = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    f(t + h, out, dy_end);
    return out;
  } catch (const OutOfChart&) {
    return std::nullopt;
  }
}

}  // namespace

OdeSolution integrate_rk4(const OdeRhs& f, double t0, const Vector& y0, double t_end, double h,
                          double exit_resolution) {
  if (!(h > 0)) throw Error("rk4: step must be positive");
  OdeSolution sol;
  Vector k;
  f(t0, y0, k);
  sol.times.push_back(t0);
  sol.states.push_back(y0);
  sol.derivatives.push_back(k);
  if (!(t_end > t0)) return sol;
  const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / h - 1e-9));
  Vector y = y0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const double step = (i + 1 == steps) ? t_end - t : h;
    Vector dy;
    auto next = rk4_step(f, t, y, k, step, dy);
    if (!next) {
      double lo = 0.0, hi = step;
      std::optional<Vector> best;
      Vector best_dy;
      while (hi - lo > exit_resolution) {
        const double mid = 0.5 * (lo + hi);
        Vector d;
        if (auto m = rk4_step(f, t, y, k, mid, d)) {
          lo = mid;
          best = std::move(m);
          best_dy = std::move(d);
        } else {
          hi = mid;
        }
      }
      if (best) {
        sol.times.push_back(t + lo);
        sol.states.push_back(*best);
        sol.derivatives.push_back(best_dy);
      }
      sol.exit = ExitReason::LeftChart;
      return sol;
    }
    y = std::move(*next);
    k = dy;
    sol.times.push_back(i + 1 == steps ? t_end : t0 + static_cast<double>(i + 1) * h);
    sol.states.push_back(y);
    sol.derivatives.push_back(dy);
  }
  return sol;
}

}  // namespace geoflow
