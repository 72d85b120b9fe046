#pragma once

#include "geoflow/domain.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace geoflow {

// Derivatives of the height function h : U -> R^c at one chart point.
//   value(a)        = h^a
//   grad(i, a)      = d_i h^a                 (m x c)
//   hess[a](i, j)   = d_i d_j h^a             (c matrices, m x m)
struct HeightJet {
  Vector value;
  Matrix grad;
  std::vector<Matrix> hess;
};

// third[a][i](j, k) = d_i d_j d_k h^a
using ThirdDerivatives = std::vector<std::vector<Matrix>>;

// Backend for a height function. Implementations evaluate wherever their
// formula makes sense; chart-domain checks happen in GraphSurface.
class HeightField {
 public:
  virtual ~HeightField() = default;

  virtual int dim() const = 0;
  virtual int codim() const = 0;
  virtual HeightJet jet(const Vector& x) const = 0;
  virtual Vector value(const Vector& x) const { return jet(x).value; }
  virtual std::optional<ThirdDerivatives> third(const Vector& /*x*/) const { return std::nullopt; }
};

// Sup-norm estimates of the first and second derivatives of h. The `_sup`
// members are the sampled maxima; `grad` and `hess` carry the safety inflation.
struct SurfaceBounds {
  double grad = 0.0;
  double hess = 0.0;
  double grad_sup = 0.0;
  double hess_sup = 0.0;
  int samples_per_axis = 0;
  double inflation = 0.0;
};

struct BoundsOptions {
  int samples_per_axis = 64;
  double inflation = 0.10;
};

// Spectral norm of the m x c gradient matrix.
double gradient_norm(const Matrix& grad);
// sqrt(sum_a |hess^a|_2^2): dominates the norm of the bilinear map (u, v) -> D^2 h(u, v).
double hessian_norm(const std::vector<Matrix>& hess);

// A submanifold M of R^n written locally as the graph {(x, h(x)) : x in U}.
// Immutable after construction; copies share the height backend.
class GraphSurface {
 public:
  GraphSurface(std::shared_ptr<const HeightField> field, ChartDomain domain, Regularity regularity,
               std::string name = {}, const BoundsOptions& bounds = {});

  int dim() const { return field_->dim(); }
  int codim() const { return field_->codim(); }
  int ambient_dim() const { return dim() + codim(); }

  const std::string& name() const { return name_; }
  const ChartDomain& domain() const { return domain_; }
  const Regularity& regularity() const { return regularity_; }
  const SurfaceBounds& bounds() const { return bounds_; }
  const HeightField& field() const { return *field_; }
  std::shared_ptr<const HeightField> field_ptr() const { return field_; }

  bool contains(const Vector& x) const { return domain_.contains(x); }

  // All of these throw OutOfChart when x is not in the domain.
  Vector height(const Vector& x) const;
  HeightJet jet(const Vector& x) const;
  std::optional<ThirdDerivatives> third(const Vector& x) const;

  void require_in_chart(const Vector& x) const;

 private:
  std::shared_ptr<const HeightField> field_;
  ChartDomain domain_;
  Regularity regularity_;
  std::string name_;
  SurfaceBounds bounds_;
};

// Regular sample grid over the domain box, restricted to points inside the domain.
std::vector<Vector> sample_domain(const ChartDomain& domain, int per_axis);

struct MetricData {
  Matrix g;
  Matrix g_inv;
  Vector point;
};

// Gamma^k_ij stored as gamma[k](i, j).
class ChristoffelSymbols {
 public:
  ChristoffelSymbols() = default;
  explicit ChristoffelSymbols(std::vector<Matrix> gamma) : gamma_(std::move(gamma)) {}

  int dim() const { return static_cast<int>(gamma_.size()); }
  double operator()(int k, int i, int j) const { return gamma_[k](i, j); }
  const Matrix& upper(int k) const { return gamma_[k]; }

  // Gamma(u, v)^k = sum_ij Gamma^k_ij u_i v_j
  Vector contract(const Vector& u, const Vector& v) const;
  // Matrix of w -> Gamma(y, w).
  Matrix along(const Vector& y) const;

 private:
  std::vector<Matrix> gamma_;
};

// Everything the geodesic and Jacobi equations need at one chart point,
// computed from one evaluation of h, Dh and D^2h.
class PointGeometry {
 public:
  PointGeometry(const GraphSurface& surface, const Vector& x);

  int dim() const { return static_cast<int>(x_.size()); }
  const Vector& point() const { return x_; }
  const HeightJet& jet() const { return jet_; }
  const Matrix& metric() const { return g_; }
  const Matrix& metric_inverse() const { return g_inv_; }

  // n x m matrix whose columns are the embedded coordinate vectors (e_i, d_i h).
  Matrix tangent_frame() const;
  // P_N = I - T g^{-1} T^T
  Matrix normal_projector() const;

  const ChristoffelSymbols& christoffel() const { return gamma_; }

  // Pi(e_i, e_j) as ambient vectors.
  const Vector& second_fundamental_basis(int i, int j) const { return pi_[i * dim() + j]; }
  Vector second_fundamental_form(const Vector& u, const Vector& v) const;

  // Matrix A with J'' = A J along a geodesic with velocity V, assembled from
  // products of second fundamental form values only.
  Matrix curvature_operator(const Vector& v) const;

 private:
  Vector x_;
  HeightJet jet_;
  Matrix g_;
  Matrix g_inv_;
  ChristoffelSymbols gamma_;
  std::vector<Vector> pi_;
};

Vector embed(const GraphSurface& surface, const Vector& x);
MetricData metric_at(const GraphSurface& surface, const Vector& x);
ChristoffelSymbols christoffel_at(const GraphSurface& surface, const Vector& x);
Vector second_fundamental_form(const GraphSurface& surface, const Vector& x, const Vector& u,
                               const Vector& v);
Matrix curvature_operator(const GraphSurface& surface, const Vector& x, const Vector& v);

// Throws DegeneratePlane when g(u,u)g(v,v) - g(u,v)^2 < 1e-12.
double sectional_curvature(const GraphSurface& surface, const Vector& x, const Vector& u,
                           const Vector& v);

// d_p Gamma at x, indexed [p]. Uses third derivatives of h when the backend
// provides them and fourth-order central differences of christoffel_at otherwise.
std::vector<ChristoffelSymbols> christoffel_derivatives_at(const GraphSurface& surface,
                                                           const Vector& x);

// Cross-check route: J -> -R(J, V)V from the Riemann tensor assembled out of
// Christoffel symbols and their derivatives.
Matrix curvature_operator_from_christoffel(const GraphSurface& surface, const Vector& x,
                                           const Vector& v);

}  // namespace geoflow
