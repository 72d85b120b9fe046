#pragma once

#include "geoflow/catalog.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <random>

namespace geoflow::test {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Uniform point of the domain box, resampled until inside the domain.
inline Vector random_point(const ChartDomain& d, std::mt19937_64& rng, double shrink = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Vector x(d.dim());
    for (int a = 0; a < d.dim(); ++a) {
      const double c = 0.5 * (d.lower()[a] + d.upper()[a]);
      x[a] = c + shrink * (u(rng) - 0.5) * d.width(a);
    }
    if (d.contains(x)) return x;
  }
}

inline Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v / v.norm();
}

}  // namespace geoflow::test
