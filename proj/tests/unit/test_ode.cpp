#include "geoflow/errors.hpp"
#include "geoflow/ode.hpp"
#include "support.hpp"

#include <cmath>

using namespace geoflow;
using geoflow::test::vec;

namespace {

void decay(double, const Vector& y, Vector& dy) { dy = -y; }

void oscillator(double, const Vector& y, Vector& dy) {
  dy.resize(2);
  dy << y[1], -y[0];
}

}  // namespace

TEST_CASE("adaptive integrator reproduces exponential decay") {
  const OdeSolution s = integrate_adaptive(decay, 0.0, vec({1.0, 2.0}), 3.0);
  CHECK(s.exit == ExitReason::Completed);
  CHECK(s.t_final() == 3.0);
  CHECK(std::abs(s.final_state()[0] - std::exp(-3.0)) < 1e-10);
  CHECK(std::abs(s.final_state()[1] - 2 * std::exp(-3.0)) < 1e-10);
  for (std::size_t i = 1; i < s.times.size(); ++i) CHECK(s.times[i] > s.times[i - 1]);
}

TEST_CASE("dense output between steps") {
  const OdeSolution s = integrate_adaptive(oscillator, 0.0, vec({0.0, 1.0}), 2.0);
  for (double t : {0.013, 0.5, 1.234, 1.999}) {
    const Vector y = s.interpolate(t);
    CHECK(std::abs(y[0] - std::sin(t)) < 1e-7);
    CHECK(std::abs(y[1] - std::cos(t)) < 1e-7);
  }
}

TEST_CASE("RK4 global error is fourth order") {
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) {
    const OdeSolution s = integrate_rk4(oscillator, 0.0, vec({0.0, 1.0}), 2.0, h);
    CHECK(s.t_final() == doctest::Approx(2.0).epsilon(1e-15));
    err.push_back(std::abs(s.final_state()[0] - std::sin(2.0)));
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    CHECK(order == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("RK4 shortens the last step") {
  const OdeSolution s = integrate_rk4(decay, 0.0, vec({1.0}), 0.35, 0.1);
  CHECK(s.times.size() == 5);
  CHECK(s.t_final() == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("leaving the region is located by bisection") {
  // y' = 1 from y = 0, defined for y <= 1 only: the exit time is 1.
  const OdeRhs f = [](double, const Vector& y, Vector& dy) {
    if (y[0] > 1.0) throw OutOfChart("left");
    dy = Vector::Ones(1);
  };
  const OdeSolution a = integrate_adaptive(f, 0.0, vec({0.0}), 5.0);
  CHECK(a.exit == ExitReason::LeftChart);
  CHECK(std::abs(a.t_final() - 1.0) < 1e-9);
  CHECK(a.final_state()[0] <= 1.0);
  const OdeSolution r = integrate_rk4(f, 0.0, vec({0.0}), 5.0, 0.3);
  CHECK(r.exit == ExitReason::LeftChart);
  CHECK(std::abs(r.t_final() - 1.0) < 1e-9);
}

TEST_CASE("zero-length integration returns the initial state") {
  const OdeSolution s = integrate_adaptive(decay, 0.0, vec({4.0}), 0.0);
  CHECK(s.exit == ExitReason::Completed);
  CHECK(s.final_state()[0] == 4.0);
  CHECK(exit_reason_name(ExitReason::LeftChart) != std::string());
}
