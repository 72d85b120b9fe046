#include "geoflow/domain.hpp"

#include "geoflow/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace geoflow {

ChartDomain::ChartDomain(Vector lower, Vector upper, std::optional<double> radius)
    : lower_(std::move(lower)), upper_(std::move(upper)), radius_(radius) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw Error("chart domain: bounds must be nonempty and of equal dimension");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) throw DomainTooSmall("chart domain: empty box");
  }
  if (radius_ && !(*radius_ > 0.0)) throw DomainTooSmall("chart domain: nonpositive radius");
}

ChartDomain ChartDomain::cube(int dim, double half_width) {
  return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
}

bool ChartDomain::contains(const Vector& x) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  }
  return !radius_ || x.squaredNorm() <= (*radius_) * (*radius_);
}

double ChartDomain::min_width() const { return (upper_ - lower_).minCoeff(); }

double ChartDomain::inradius() const {
  const Vector c = center();
  double r = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    r = std::min({r, c[i] - lower_[i], upper_[i] - c[i]});
  }
  if (radius_) r = std::min(r, *radius_ - c.norm());
  return r;
}

ChartDomain ChartDomain::shrunk(double margin) const {
  const Vector lo = lower_.array() + margin;
  const Vector hi = upper_.array() - margin;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw DomainTooSmall("chart domain: erosion leaves an empty box");
  }
  std::optional<double> r = radius_;
  if (r) {
    *r -= margin;
    if (!(*r > 0.0)) throw DomainTooSmall("chart domain: erosion leaves an empty ball");
  }
  return {lo, hi, r};
}

ChartDomain ChartDomain::intersect(const ChartDomain& other) const {
  const Vector lo = lower_.cwiseMax(other.lower_);
  const Vector hi = upper_.cwiseMin(other.upper_);
  std::optional<double> r = radius_;
  if (other.radius_) r = r ? std::min(*r, *other.radius_) : *other.radius_;
  return {lo, hi, r};
}

bool ChartDomain::operator==(const ChartDomain& other) const {
  return lower_ == other.lower_ && upper_ == other.upper_ && radius_ == other.radius_;
}

std::string Regularity::tag() const {
  switch (cls) {
    case RegularityClass::C11: return "C11";
    case RegularityClass::C2: return "C2";
    case RegularityClass::C2Alpha: return "C2alpha";
    case RegularityClass::C3: return "C3";
    case RegularityClass::Smooth: return "smooth";
  }
  return "smooth";
}

Regularity Regularity::parse(const std::string& tag, double alpha) {
  std::string t = tag;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "c11") return {RegularityClass::C11, 0.0};
  if (t == "c2") return {RegularityClass::C2, 0.0};
  if (t == "c2alpha") {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("C2alpha regularity needs alpha in (0, 1]");
    return {RegularityClass::C2Alpha, alpha};
  }
  if (t == "c3") return {RegularityClass::C3, 0.0};
  if (t == "smooth") return {RegularityClass::Smooth, 0.0};
  throw ConfigError("unknown regularity tag '" + tag + "'");
}

}  // namespace geoflow
