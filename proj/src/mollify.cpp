#include "geoflow/mollify.hpp"

#include "geoflow/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>

namespace geoflow {

double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

double bump_mass(int dim) {
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  const auto radial = [dim](double r) { return std::pow(r, dim - 1) * bump(r * r); };
  return sphere * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, 0.0, 1.0, 15, 1e-14);
}

KernelStencil kernel_stencil(int dim, double eps, double spacing) {
  if (!(eps > 0.0) || !(spacing > 0.0)) throw ConfigError("kernel stencil: eps and spacing must be positive");
  const int reach = static_cast<int>(std::ceil(eps / spacing));
  KernelStencil st;
  std::vector<int> k(dim, -reach);
  double total = 0.0;
  while (true) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (k[a] * spacing / eps) * (k[a] * spacing / eps);
    if (r2 < 1.0) {
      const double w = bump(r2);
      // grad_z rho(z / eps) = rho * (-2 u / (1 - |u|^2)^2) / eps, u = z / eps
      Vector g(dim);
      for (int a = 0; a < dim; ++a) g[a] = w * (-2.0 * k[a] * spacing / eps) / ((1.0 - r2) * (1.0 - r2)) / eps;
      st.offsets.push_back(k);
      st.weights.push_back(w);
      st.gradients.push_back(g);
      total += w;
    }
    int a = 0;
    while (a < dim && ++k[a] > reach) k[a++] = -reach;
    if (a == dim) break;
  }
  for (double& w : st.weights) w /= total;
  for (Vector& g : st.gradients) g /= total;
  return st;
}

GraphSurface mollify(const GraphSurface& surface, double eps, const MollifyOptions& opts) {
  if (!(eps > 0.0)) throw ConfigError("mollify: eps must be positive");
  if (opts.nodes_per_radius < 2) throw ConfigError("mollify: need at least 2 nodes per kernel radius");
  const int m = surface.dim();
  const int c = surface.codim();
  const ChartDomain& dom = surface.domain();
  if (!(2.0 * eps < dom.min_width())) throw DomainTooSmall("mollify: eps must be below half the domain width");
  ChartDomain target = dom.shrunk(eps);
  if (opts.region) target = target.intersect(*opts.region);

  const double step = eps / opts.nodes_per_radius;
  const KernelStencil st = kernel_stencil(m, eps, step);
  const int reach = opts.nodes_per_radius;

  Lattice out;
  out.origin.resize(m);
  out.spacing = Vector::Constant(m, step);
  out.counts.resize(m);
  Lattice fine;
  fine.origin.resize(m);
  fine.spacing = out.spacing;
  fine.counts.resize(m);
  for (int a = 0; a < m; ++a) {
    const long lo = static_cast<long>(std::ceil(target.lower()[a] / step - 1e-9));
    const long hi = static_cast<long>(std::floor(target.upper()[a] / step + 1e-9));
    if (hi - lo + 1 < 4) throw DomainTooSmall("mollify: fewer than 4 lattice nodes on an axis");
    out.origin[a] = lo * step;
    out.counts[a] = static_cast<int>(hi - lo + 1);
    fine.origin[a] = (lo - reach) * step;
    fine.counts[a] = out.counts[a] + 2 * reach;
  }

  // Base jets on the fine lattice; NaN outside the chart.
  const int nf = jet_field_size(m, c);
  const std::size_t n_fine = fine.size();
  std::vector<double> base(n_fine * nf, std::numeric_limits<double>::quiet_NaN());
  {
    std::vector<int> k(m, 0);
    for (std::size_t node = 0; node < n_fine; ++node) {
      Vector x = fine.point(k);
      for (int a = 0; a < m; ++a) {
        if (std::abs(x[a] - dom.lower()[a]) < 1e-12) x[a] = dom.lower()[a];
        if (std::abs(x[a] - dom.upper()[a]) < 1e-12) x[a] = dom.upper()[a];
      }
      if (dom.contains(x)) {
        const HeightJet j = surface.field().jet(x);
        double* f = &base[node * nf];
        for (int a = 0; a < c; ++a) f[a] = j.value[a];
        for (int i = 0; i < m; ++i) {
          for (int a = 0; a < c; ++a) f[c + i * c + a] = j.grad(i, a);
        }
        for (int i = 0; i < m; ++i) {
          for (int jj = 0; jj < m; ++jj) {
            for (int a = 0; a < c; ++a) f[c * (1 + m) + (i * m + jj) * c + a] = j.hess[a](i, jj);
          }
        }
      }
      int a = 0;
      while (a < m && ++k[a] == fine.counts[a]) k[a++] = 0;
    }
  }

  // Flat index shift of every kernel offset in the fine lattice.
  std::vector<long> stride(m);
  stride[0] = 1;
  for (int a = 1; a < m; ++a) stride[a] = stride[a - 1] * fine.counts[a - 1];
  std::vector<long> shift(st.offsets.size());
  for (std::size_t s = 0; s < st.offsets.size(); ++s) {
    long d = 0;
    for (int a = 0; a < m; ++a) d -= st.offsets[s][a] * stride[a];
    shift[s] = d;
  }

  const int hess_first = c * (1 + m);
  const int nh = m * m * c;
  const std::size_t n_out = out.size();
  std::vector<double> fields(n_out * nf, 0.0);
  std::vector<double> slopes(n_out * m * nf, 0.0);
  {
    std::vector<int> k(m, 0);
    std::vector<double> acc(nf), dacc(m * nh);
    for (std::size_t node = 0; node < n_out; ++node) {
      long centre = 0;
      for (int a = 0; a < m; ++a) centre += (k[a] + reach) * stride[a];
      std::fill(acc.begin(), acc.end(), 0.0);
      std::fill(dacc.begin(), dacc.end(), 0.0);
      for (std::size_t s = 0; s < shift.size(); ++s) {
        const double* f = &base[static_cast<std::size_t>(centre + shift[s]) * nf];
        const double w = st.weights[s];
        for (int q = 0; q < nf; ++q) acc[q] += w * f[q];
        const Vector& g = st.gradients[s];
        for (int a = 0; a < m; ++a) {
          const double ga = g[a];
          for (int q = 0; q < nh; ++q) dacc[a * nh + q] += ga * f[hess_first + q];
        }
      }
      std::copy(acc.begin(), acc.end(), &fields[node * nf]);
      for (int a = 0; a < m; ++a) {
        double* sl = &slopes[(node * m + a) * nf];
        // d_a value = grad_a; d_a grad_i = hess_ia; d_a hess = kernel-derivative convolution
        for (int q = 0; q < c; ++q) sl[q] = acc[c + a * c + q];
        for (int i = 0; i < m; ++i) {
          for (int q = 0; q < c; ++q) sl[c + i * c + q] = acc[hess_first + (i * m + a) * c + q];
        }
        for (int q = 0; q < nh; ++q) sl[hess_first + q] = dacc[a * nh + q];
      }
      int a = 0;
      while (a < m && ++k[a] == out.counts[a]) k[a++] = 0;
    }
  }

  if (opts.normalize) {
    // Node nearest the origin, or the region centre when the origin is outside.
    const Vector anchor = target.contains(Vector::Zero(m)) ? Vector::Zero(m) : target.center();
    std::vector<int> k(m);
    for (int a = 0; a < m; ++a) {
      k[a] = std::clamp(static_cast<int>(std::lround((anchor[a] - out.origin[a]) / step)), 0, out.counts[a] - 1);
    }
    const Vector at = out.point(k);
    const Vector h0 = surface.height(at);
    const std::size_t node = out.flat_index(k);
    for (int q = 0; q < c; ++q) {
      const double offset = h0[q] - fields[node * nf + q];
      for (std::size_t n = 0; n < n_out; ++n) fields[n * nf + q] += offset;
    }
  }

  auto field = std::make_shared<GridField>(out, c, std::move(fields), std::move(slopes));
  ChartDomain valid = out.box();
  if (target.radius()) {
    valid = ChartDomain(valid.lower(), valid.upper(), *target.radius() - (std::sqrt(double(m)) + 2.0) * step);
  }
  field->set_valid_domain(valid);
  char label[64];
  std::snprintf(label, sizeof label, "@eps=%g", eps);
  return GraphSurface(field, valid, {RegularityClass::Smooth, 0.0}, surface.name() + label);
}

}  // namespace geoflow
