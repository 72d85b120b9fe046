#pragma once

#include "geoflow/domain.hpp"

#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace geoflow {

// A nondecreasing function mu on [0, inf) with mu(0) = 0.
class Modulus {
 public:
  enum class Kind { Empirical, Linear, Power, Propagated };

  static Modulus linear(double c);
  static Modulus power(double c, double alpha);
  // Per-bin values at the bin upper edges; made nondecreasing by a running max.
  static Modulus empirical(std::vector<double> upper_edges, std::vector<double> values,
                           std::vector<bool> populated);
  // Gamma(delta) = c_tilde * t1 * exp(c_bar * t1) * inner(delta)
  static Modulus propagated(double c_tilde, double c_bar, double t1, const Modulus& inner);

  Kind kind() const { return kind_; }
  double operator()(double delta) const;

  // Whether the integral of 1/mu over (0, 1] diverges.
  bool osgood_divergent() const;

  // Multiplicative constant of Linear, Power and Propagated (for the latter
  // c_tilde * t1 * exp(c_bar * t1)).
  double scale() const { return scale_; }
  double alpha() const { return alpha_; }
  const Modulus* inner() const { return inner_.get(); }

  const std::vector<double>& upper_edges() const { return edges_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<bool>& populated() const { return populated_; }

  // delta,mu rows at the bin upper edges (or on a log grid for closed forms).
  void write_csv(std::ostream& out) const;

 private:
  Kind kind_ = Kind::Linear;
  double scale_ = 0.0;
  double alpha_ = 1.0;
  std::vector<double> edges_;
  std::vector<double> values_;
  std::vector<bool> populated_;
  std::shared_ptr<const Modulus> inner_;
};

struct ModulusBins {
  int bins = 32;
  double delta_min = 1e-6;
  double delta_max = 0.0;  // 0: largest sampled gap
};

std::vector<double> log_bin_edges(const ModulusBins& bins);

// From (gap, deviation) pairs.
Modulus modulus_from_gaps(const std::vector<std::pair<double, double>>& gaps, const ModulusBins& bins = {});

// From (input, output) samples of a map, over all sample pairs.
Modulus empirical_modulus(const std::vector<std::pair<Vector, Vector>>& samples, const ModulusBins& bins = {});

}  // namespace geoflow
