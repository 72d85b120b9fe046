#include "geoflow/catalog.hpp"

#include "geoflow/errors.hpp"

#include <cmath>
#include <memory>

namespace geoflow {

namespace {

double sgn(double s) { return (s > 0.0) - (s < 0.0); }

}  // namespace

HeightJet FlatField::jet(const Vector& x) const {
  (void)x;
  return {Vector::Zero(codim_), Matrix::Zero(dim_, codim_),
          std::vector<Matrix>(codim_, Matrix::Zero(dim_, dim_))};
}

std::optional<ThirdDerivatives> FlatField::third(const Vector& x) const {
  (void)x;
  return ThirdDerivatives(codim_, std::vector<Matrix>(dim_, Matrix::Zero(dim_, dim_)));
}

HeightJet HemisphereField::jet(const Vector& x) const {
  const double h = std::sqrt(1.0 - x.squaredNorm());
  const double h3 = h * h * h;
  HeightJet j;
  j.value = Vector::Constant(1, h);
  j.grad = -x / h;
  j.hess = {-Matrix::Identity(dim_, dim_) / h - x * x.transpose() / h3};
  return j;
}

std::optional<ThirdDerivatives> HemisphereField::third(const Vector& x) const {
  // d_ijk h = -(d_ij x_k + d_ik x_j + d_jk x_i) / h^3 - 3 x_i x_j x_k / h^5
  const double h = std::sqrt(1.0 - x.squaredNorm());
  const double h3 = h * h * h;
  const double h5 = h3 * h * h;
  std::vector<Matrix> t(dim_, Matrix::Zero(dim_, dim_));
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        const double delta = (i == j ? x[k] : 0.0) + (i == k ? x[j] : 0.0) + (j == k ? x[i] : 0.0);
        t[i](j, k) = -delta / h3 - 3.0 * x[i] * x[j] * x[k] / h5;
      }
    }
  }
  return ThirdDerivatives{std::move(t)};
}

HeightJet ProfileField::jet(const Vector& x) const {
  const double s = x[0];
  HeightJet j;
  j.value = Vector::Constant(1, f_(s));
  j.grad = Matrix::Zero(dim_, 1);
  j.grad(0, 0) = df_(s);
  j.hess = {Matrix::Zero(dim_, dim_)};
  j.hess[0](0, 0) = d2f_(s);
  return j;
}

Vector ProfileField::value(const Vector& x) const { return Vector::Constant(1, f_(x[0])); }

std::optional<ThirdDerivatives> ProfileField::third(const Vector& x) const {
  if (!d3f_) return std::nullopt;
  std::vector<Matrix> t(dim_, Matrix::Zero(dim_, dim_));
  t[0](0, 0) = d3f_(x[0]);
  return ThirdDerivatives{std::move(t)};
}

std::vector<std::string> catalog_names() {
  return {"flat", "hemisphere", "trough", "c21_cubic", "c2alpha", "vee"};
}

CatalogEntry catalog_entry(const std::string& name, const CatalogParams& params) {
  const auto pick = [&](ChartDomain d) { return params.domain ? *params.domain : d; };
  if (name == "flat") {
    return {name, "h(x) = 0", {RegularityClass::Smooth, 0.0}, pick(ChartDomain::cube(2, 1.0)),
            {"geodesics are straight lines", "exp is translation", "curvature 0"}};
  }
  if (name == "hemisphere") {
    return {name,
            "h(x) = sqrt(1 - |x|^2)",
            {RegularityClass::Smooth, 0.0},
            pick(ChartDomain(Vector::Constant(2, -0.8), Vector::Constant(2, 0.8), 0.8)),
            {"sectional curvature 1", "great circles: x(t) = sin(t) e for unit e at the pole",
             "Jacobi fields |J(t)| = sin t", "chart exit along an axis at t = asin(0.8)"}};
  }
  if (name == "trough") {
    return {name, "h(x) = x1^2 / 2", {RegularityClass::Smooth, 0.0}, pick(ChartDomain::cube(2, 1.0)),
            {"Gauss curvature 0 (parabolic cylinder)", "lines x1 = const are geodesics"}};
  }
  if (name == "c21_cubic") {
    return {name, "h(x) = |x1|^3", {RegularityClass::C2, 0.0}, pick(ChartDomain::cube(2, 1.0)),
            {"class C^{2,1}", "sup |D^2 h| = 6 on [-1, 1]^2", "Gauss curvature 0"}};
  }
  if (name == "c2alpha") {
    if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
      throw ConfigError("c2alpha: alpha must lie in (0, 1]");
    }
    return {name,
            "h(x) = |x1|^(2+alpha)",
            {RegularityClass::C2Alpha, params.alpha},
            pick(ChartDomain::cube(2, 1.0)),
            {"class C^{2,alpha}", "Gauss curvature 0"}};
  }
  if (name == "vee") {
    return {name, "h(x) = x1 |x1|", {RegularityClass::C11, 0.0}, pick(ChartDomain::cube(2, 1.0)),
            {"class C^{1,1}", "sup |D^2 h| = 2", "D^2 h jumps across x1 = 0", "Gauss curvature 0"}};
  }
  throw UnknownSurface("unknown catalog surface '" + name + "'");
}

GraphSurface make_catalog_surface(const std::string& name, const CatalogParams& params) {
  const CatalogEntry entry = catalog_entry(name, params);
  const int m = entry.domain.dim();
  std::shared_ptr<const HeightField> field;
  if (name == "flat") {
    field = std::make_shared<FlatField>(m, 1);
  } else if (name == "hemisphere") {
    field = std::make_shared<HemisphereField>(m);
  } else if (name == "trough") {
    field = std::make_shared<ProfileField>(
        m, [](double s) { return 0.5 * s * s; }, [](double s) { return s; },
        [](double) { return 1.0; }, [](double) { return 0.0; });
  } else if (name == "c21_cubic") {
    field = std::make_shared<ProfileField>(
        m, [](double s) { return std::abs(s) * s * s; }, [](double s) { return 3.0 * s * std::abs(s); },
        [](double s) { return 6.0 * std::abs(s); });
  } else if (name == "c2alpha") {
    const double a = params.alpha;
    field = std::make_shared<ProfileField>(
        m, [a](double s) { return std::pow(std::abs(s), 2.0 + a); },
        [a](double s) { return (2.0 + a) * std::pow(std::abs(s), 1.0 + a) * sgn(s); },
        [a](double s) { return (2.0 + a) * (1.0 + a) * std::pow(std::abs(s), a); });
  } else if (name == "vee") {
    field = std::make_shared<ProfileField>(
        m, [](double s) { return s * std::abs(s); }, [](double s) { return 2.0 * std::abs(s); },
        [](double s) { return 2.0 * sgn(s); });
  }
  return GraphSurface(field, entry.domain, entry.regularity, name);
}

}  // namespace geoflow
