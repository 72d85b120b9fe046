#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace geoflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Chart domain U: an axis-aligned box, optionally intersected with the
// closed ball of the given radius around the origin.
class ChartDomain {
 public:
  ChartDomain() = default;
  ChartDomain(Vector lower, Vector upper, std::optional<double> radius = std::nullopt);

  static ChartDomain cube(int dim, double half_width);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::optional<double>& radius() const { return radius_; }

  bool contains(const Vector& x) const;

  double width(int axis) const { return upper_[axis] - lower_[axis]; }
  double min_width() const;
  Vector center() const { return 0.5 * (lower_ + upper_); }

  // Distance from the center to the boundary.
  double inradius() const;

  // Erodes the domain by `margin` on every side. Throws DomainTooSmall when
  // nothing is left.
  ChartDomain shrunk(double margin) const;
  ChartDomain intersect(const ChartDomain& other) const;

  bool operator==(const ChartDomain& other) const;

 private:
  Vector lower_;
  Vector upper_;
  std::optional<double> radius_;
};

enum class RegularityClass { C11 = 0, C2 = 1, C2Alpha = 2, C3 = 3, Smooth = 4 };

struct Regularity {
  RegularityClass cls = RegularityClass::Smooth;
  double alpha = 0.0;  // Hölder exponent, meaningful for C2Alpha only

  std::string tag() const;
  bool at_least(RegularityClass c) const { return static_cast<int>(cls) >= static_cast<int>(c); }

  // Accepts "C11", "C2", "C2alpha", "C3", "smooth" (case-insensitive).
  static Regularity parse(const std::string& tag, double alpha = 0.0);

  bool operator==(const Regularity&) const = default;
};

}  // namespace geoflow
