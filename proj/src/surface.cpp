#include "geoflow/surface.hpp"

#include "geoflow/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace geoflow {

namespace {

std::string describe(const Vector& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

double symmetric_norm(const Matrix& a) {
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SurfaceBounds sample_bounds(const HeightField& field, const ChartDomain& domain,
                            const BoundsOptions& opts) {
  SurfaceBounds b;
  b.samples_per_axis = opts.samples_per_axis;
  b.inflation = opts.inflation;
  for (const Vector& x : sample_domain(domain, opts.samples_per_axis)) {
    const HeightJet j = field.jet(x);
    b.grad_sup = std::max(b.grad_sup, gradient_norm(j.grad));
    b.hess_sup = std::max(b.hess_sup, hessian_norm(j.hess));
  }
  b.grad = b.grad_sup * (1.0 + opts.inflation);
  b.hess = b.hess_sup * (1.0 + opts.inflation);
  return b;
}

}  // namespace

double gradient_norm(const Matrix& grad) {
  if (grad.cols() == 1) return grad.col(0).norm();
  return std::sqrt(symmetric_norm(grad.transpose() * grad));
}

double hessian_norm(const std::vector<Matrix>& hess) {
  double s = 0.0;
  for (const Matrix& h : hess) s += std::pow(symmetric_norm(h), 2);
  return std::sqrt(s);
}

std::vector<Vector> sample_domain(const ChartDomain& domain, int per_axis) {
  const int m = domain.dim();
  std::vector<Vector> out;
  std::vector<int> idx(m, 0);
  const auto coord = [&](int axis, int k) {
    if (per_axis == 1) return domain.center()[axis];
    return domain.lower()[axis] + domain.width(axis) * k / (per_axis - 1);
  };
  while (true) {
    Vector x(m);
    for (int a = 0; a < m; ++a) x[a] = coord(a, idx[a]);
    if (domain.contains(x)) out.push_back(x);
    int a = 0;
    while (a < m && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == m) break;
  }
  return out;
}

GraphSurface::GraphSurface(std::shared_ptr<const HeightField> field, ChartDomain domain,
                           Regularity regularity, std::string name, const BoundsOptions& bounds)
    : field_(std::move(field)),
      domain_(std::move(domain)),
      regularity_(regularity),
      name_(std::move(name)) {
  if (!field_) throw Error("graph surface: null height field");
  if (field_->dim() != domain_.dim()) throw Error("graph surface: domain dimension mismatch");
  bounds_ = sample_bounds(*field_, domain_, bounds);
}

void GraphSurface::require_in_chart(const Vector& x) const {
  if (!domain_.contains(x)) {
    throw OutOfChart("point " + describe(x) + " is outside the chart domain of '" + name_ + "'");
  }
}

Vector GraphSurface::height(const Vector& x) const {
  require_in_chart(x);
  return field_->value(x);
}

HeightJet GraphSurface::jet(const Vector& x) const {
  require_in_chart(x);
  return field_->jet(x);
}

std::optional<ThirdDerivatives> GraphSurface::third(const Vector& x) const {
  require_in_chart(x);
  if (!regularity_.at_least(RegularityClass::C3)) return std::nullopt;
  return field_->third(x);
}

Vector ChristoffelSymbols::contract(const Vector& u, const Vector& v) const {
  Vector out(dim());
  for (int k = 0; k < dim(); ++k) out[k] = u.dot(gamma_[k] * v);
  return out;
}

Matrix ChristoffelSymbols::along(const Vector& y) const {
  Matrix out(dim(), dim());
  for (int k = 0; k < dim(); ++k) out.row(k) = y.transpose() * gamma_[k];
  return out;
}

namespace {

// W = g^{-1} Dh; Gamma^k = sum_a W(k, a) hess^a
ChristoffelSymbols christoffel_from_jet(const HeightJet& jet, const Matrix& g_inv) {
  const Eigen::Index m = g_inv.rows();
  const Matrix w = g_inv * jet.grad;
  std::vector<Matrix> gamma(m, Matrix::Zero(m, m));
  for (Eigen::Index k = 0; k < m; ++k) {
    for (std::size_t a = 0; a < jet.hess.size(); ++a) gamma[k] += w(k, a) * jet.hess[a];
  }
  return ChristoffelSymbols(std::move(gamma));
}

}  // namespace

PointGeometry::PointGeometry(const GraphSurface& surface, const Vector& x)
    : x_(x), jet_(surface.jet(x)) {
  const int m = surface.dim();
  const int c = surface.codim();
  const Matrix& grad = jet_.grad;
  g_ = Matrix::Identity(m, m) + grad * grad.transpose();
  g_inv_ = g_.llt().solve(Matrix::Identity(m, m));

  gamma_ = christoffel_from_jet(jet_, g_inv_);

  // The ambient second derivative (0, d_ij h) splits as T Gamma_ij + Pi_ij,
  // so Pi_ij = (-Gamma_ij, d_ij h - Dh^T Gamma_ij).
  pi_.resize(static_cast<std::size_t>(m) * m);
  Vector hij(c);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int a = 0; a < c; ++a) hij[a] = jet_.hess[a](i, j);
      Vector tang(m);
      for (int k = 0; k < m; ++k) tang[k] = gamma_(k, i, j);
      Vector p(m + c);
      p.head(m) = -tang;
      p.tail(c) = hij - grad.transpose() * tang;
      pi_[i * m + j] = std::move(p);
    }
  }
}

Matrix PointGeometry::tangent_frame() const {
  const int m = dim();
  const int c = static_cast<int>(jet_.grad.cols());
  Matrix t(m + c, m);
  t.topRows(m).setIdentity();
  t.bottomRows(c) = jet_.grad.transpose();
  return t;
}

Matrix PointGeometry::normal_projector() const {
  const Matrix t = tangent_frame();
  return Matrix::Identity(t.rows(), t.rows()) - t * g_inv_ * t.transpose();
}

Vector PointGeometry::second_fundamental_form(const Vector& u, const Vector& v) const {
  const int m = dim();
  Vector out = Vector::Zero(pi_.front().size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double w = u[i] * v[j];
      if (w != 0.0) out += w * pi_[i * m + j];
    }
  }
  return out;
}

Matrix PointGeometry::curvature_operator(const Vector& v) const {
  // <J'', W> = <Pi(J, V), Pi(V, W)> - <Pi(V, V), Pi(J, W)>
  const int m = dim();
  std::vector<Vector> pv(m);
  for (int j = 0; j < m; ++j) {
    pv[j] = Vector::Zero(pi_.front().size());
    for (int i = 0; i < m; ++i) pv[j] += v[i] * pi_[j * m + i];
  }
  Vector pvv = Vector::Zero(pi_.front().size());
  for (int j = 0; j < m; ++j) pvv += v[j] * pv[j];

  Matrix b(m, m);
  for (int l = 0; l < m; ++l) {
    for (int j = 0; j < m; ++j) {
      b(l, j) = pv[j].dot(pv[l]) - pvv.dot(pi_[j * m + l]);
    }
  }
  return g_inv_ * b;
}

Vector embed(const GraphSurface& surface, const Vector& x) {
  const Vector h = surface.height(x);
  Vector p(x.size() + h.size());
  p << x, h;
  return p;
}

MetricData metric_at(const GraphSurface& surface, const Vector& x) {
  const PointGeometry geo(surface, x);
  return {geo.metric(), geo.metric_inverse(), x};
}

ChristoffelSymbols christoffel_at(const GraphSurface& surface, const Vector& x) {
  const HeightJet jet = surface.jet(x);
  const int m = surface.dim();
  const Matrix g = Matrix::Identity(m, m) + jet.grad * jet.grad.transpose();
  return christoffel_from_jet(jet, g.llt().solve(Matrix::Identity(m, m)));
}

Vector second_fundamental_form(const GraphSurface& surface, const Vector& x, const Vector& u,
                               const Vector& v) {
  return PointGeometry(surface, x).second_fundamental_form(u, v);
}

Matrix curvature_operator(const GraphSurface& surface, const Vector& x, const Vector& v) {
  return PointGeometry(surface, x).curvature_operator(v);
}

double sectional_curvature(const GraphSurface& surface, const Vector& x, const Vector& u,
                           const Vector& v) {
  const PointGeometry geo(surface, x);
  const Matrix& g = geo.metric();
  const double denom = u.dot(g * u) * v.dot(g * v) - std::pow(u.dot(g * v), 2);
  if (denom < 1e-12) throw DegeneratePlane("sectional curvature: u and v span a degenerate plane");
  const Vector puu = geo.second_fundamental_form(u, u);
  const Vector pvv = geo.second_fundamental_form(v, v);
  const Vector puv = geo.second_fundamental_form(u, v);
  return (puu.dot(pvv) - puv.squaredNorm()) / denom;
}

std::vector<ChristoffelSymbols> christoffel_derivatives_at(const GraphSurface& surface,
                                                           const Vector& x) {
  const int m = surface.dim();
  const int c = surface.codim();
  std::vector<ChristoffelSymbols> out;
  out.reserve(m);

  if (auto third = surface.third(x)) {
    const HeightJet jet = surface.jet(x);
    const Matrix& grad = jet.grad;
    const Matrix g = Matrix::Identity(m, m) + grad * grad.transpose();
    const Matrix g_inv = g.llt().solve(Matrix::Identity(m, m));
    const Matrix w = g_inv * grad;
    for (int p = 0; p < m; ++p) {
      Matrix dgrad(m, c);  // d_p (d_l h^a)
      for (int a = 0; a < c; ++a) dgrad.col(a) = jet.hess[a].col(p);
      const Matrix dg = dgrad * grad.transpose() + grad * dgrad.transpose();
      const Matrix dg_inv = -g_inv * dg * g_inv;
      const Matrix dw = dg_inv * grad + g_inv * dgrad;
      std::vector<Matrix> d(m, Matrix::Zero(m, m));
      for (int k = 0; k < m; ++k) {
        for (int a = 0; a < c; ++a) {
          d[k] += dw(k, a) * jet.hess[a] + w(k, a) * (*third)[a][p];
        }
      }
      out.emplace_back(std::move(d));
    }
    return out;
  }

  const double step = 1e-3 * surface.domain().min_width();
  for (int p = 0; p < m; ++p) {
    std::vector<Matrix> d(m, Matrix::Zero(m, m));
    const double weights[4] = {1.0, -8.0, 8.0, -1.0};
    const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int s = 0; s < 4; ++s) {
      Vector xs = x;
      xs[p] += offsets[s] * step;
      const ChristoffelSymbols gs = christoffel_at(surface, xs);
      for (int k = 0; k < m; ++k) d[k] += weights[s] * gs.upper(k);
    }
    for (Matrix& dk : d) dk /= 12.0 * step;
    out.emplace_back(std::move(d));
  }
  return out;
}

Matrix curvature_operator_from_christoffel(const GraphSurface& surface, const Vector& x,
                                           const Vector& v) {
  const int m = surface.dim();
  const ChristoffelSymbols gamma = christoffel_at(surface, x);
  const std::vector<ChristoffelSymbols> dgamma = christoffel_derivatives_at(surface, x);

  // R(d_i, d_j) d_k = R^l_ijk d_l with
  // R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^p_jk G^l_ip - G^p_ik G^l_jp.
  const auto riemann = [&](int l, int i, int j, int k) {
    double r = dgamma[i](l, j, k) - dgamma[j](l, i, k);
    for (int p = 0; p < m; ++p) r += gamma(p, j, k) * gamma(l, i, p) - gamma(p, i, k) * gamma(l, j, p);
    return r;
  };

  // J'' = -R(J, V) V
  Matrix a = Matrix::Zero(m, m);
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) s += v[j] * v[k] * riemann(l, i, j, k);
      }
      a(l, i) = -s;
    }
  }
  return a;
}

}  // namespace geoflow
