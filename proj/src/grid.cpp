#include "geoflow/grid.hpp"

#include "geoflow/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <memory>

namespace geoflow {

std::size_t Lattice::size() const {
  std::size_t n = 1;
  for (int c : counts) n *= static_cast<std::size_t>(c);
  return n;
}

std::size_t Lattice::flat_index(const std::vector<int>& k) const {
  std::size_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a) idx = idx * counts[a] + k[a];
  return idx;
}

Vector Lattice::point(const std::vector<int>& k) const {
  Vector x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = origin[a] + k[a] * spacing[a];
  return x;
}

ChartDomain Lattice::box() const {
  Vector hi(dim());
  for (int a = 0; a < dim(); ++a) hi[a] = origin[a] + (counts[a] - 1) * spacing[a];
  return {origin, hi};
}

int jet_field_size(int dim, int codim) { return codim * (1 + dim + dim * dim); }

GridField::GridField(Lattice lattice, int codim, std::vector<double> fields, std::vector<double> slopes)
    : lattice_(std::move(lattice)), codim_(codim) {
  const int m = lattice_.dim();
  for (int c : lattice_.counts) {
    if (c < 2) throw DomainTooSmall("grid field: need at least 2 nodes per axis");
  }
  nf_ = jet_field_size(m, codim);
  subsets_ = 1 << m;
  const std::size_t n = lattice_.size();
  if (fields.size() != n * nf_) throw Error("grid field: field size does not match the lattice");
  if (!slopes.empty() && slopes.size() != n * m * nf_) throw Error("grid field: slope size mismatch");
  valid_ = lattice_.box();

  data_.assign(n * subsets_ * nf_, 0.0);
  const auto at = [&](std::size_t node, int set) { return &data_[(node * subsets_ + set) * nf_]; };
  for (std::size_t node = 0; node < n; ++node) {
    std::copy_n(&fields[node * nf_], nf_, at(node, 0));
    if (!slopes.empty()) {
      for (int a = 0; a < m; ++a) std::copy_n(&slopes[(node * m + a) * nf_], nf_, at(node, 1 << a));
    }
  }

  // Fill the remaining subsets by differencing along their highest axis, in
  // order of increasing size so every source is already available.
  std::vector<int> order;
  for (int set = 1; set < subsets_; ++set) {
    if (std::popcount(static_cast<unsigned>(set)) == 1 && !slopes.empty()) continue;
    order.push_back(set);
  }
  std::stable_sort(order.begin(), order.end(), [](int a, int b) {
    return std::popcount(static_cast<unsigned>(a)) < std::popcount(static_cast<unsigned>(b));
  });
  const bool exact_pairs = !slopes.empty();
  const int hess_first = codim * (1 + m);
  std::vector<int> k(m);
  for (int set : order) {
    const int axis = std::bit_width(static_cast<unsigned>(set)) - 1;
    const int src = set & ~(1 << axis);
    std::fill(k.begin(), k.end(), 0);
    for (std::size_t node = 0; node < n; ++node) {
      std::vector<int> lo = k, hi = k;
      double span = 2.0;
      if (k[axis] == 0) {
        span = 1.0;
      } else {
        --lo[axis];
      }
      if (k[axis] == lattice_.counts[axis] - 1) {
        span -= 1.0;
      } else {
        ++hi[axis];
      }
      const double* a = at(lattice_.flat_index(lo), src);
      const double* b = at(lattice_.flat_index(hi), src);
      double* out = at(node, set);
      const double h = span * lattice_.spacing[axis];
      for (int f = 0; f < nf_; ++f) out[f] = (b[f] - a[f]) / h;
      if (exact_pairs && std::popcount(static_cast<unsigned>(set)) == 2) {
        // d_p d_q of value and gradient are Hessian entries and their slopes.
        const int p = std::countr_zero(static_cast<unsigned>(set));
        const double* base = at(node, 0);
        const double* slope_q = at(node, 1 << axis);
        for (int c = 0; c < codim_; ++c) out[c] = base[hess_first + (p * m + axis) * codim_ + c];
        for (int i = 0; i < m; ++i) {
          for (int c = 0; c < codim_; ++c) {
            out[codim_ + i * codim_ + c] = slope_q[hess_first + (i * m + p) * codim_ + c];
          }
        }
      }
      int d = 0;
      while (d < m && ++k[d] == lattice_.counts[d]) k[d++] = 0;
    }
  }
}

void GridField::interpolate(const Vector& x, int first, int count, double* out, int deriv_axis) const {
  const int m = lattice_.dim();
  std::vector<int> base(m);
  // w[a][2 * bit + in_set]
  std::vector<std::array<double, 4>> w(m);
  for (int a = 0; a < m; ++a) {
    const double s = (x[a] - lattice_.origin[a]) / lattice_.spacing[a];
    const int i = std::clamp(static_cast<int>(std::floor(s)), 0, lattice_.counts[a] - 2);
    const double u = s - i;
    const double d = lattice_.spacing[a];
    base[a] = i;
    if (a == deriv_axis) {
      w[a] = {(6 * u * u - 6 * u) / d, 3 * u * u - 4 * u + 1, (-6 * u * u + 6 * u) / d, 3 * u * u - 2 * u};
    } else {
      w[a] = {2 * u * u * u - 3 * u * u + 1, d * (u * u * u - 2 * u * u + u), -2 * u * u * u + 3 * u * u,
              d * (u * u * u - u * u)};
    }
  }
  std::fill_n(out, count, 0.0);
  std::vector<int> k(m);
  for (int corner = 0; corner < subsets_; ++corner) {
    for (int a = 0; a < m; ++a) k[a] = base[a] + ((corner >> a) & 1);
    const std::size_t node = lattice_.flat_index(k);
    for (int set = 0; set < subsets_; ++set) {
      double weight = 1.0;
      for (int a = 0; a < m; ++a) weight *= w[a][2 * ((corner >> a) & 1) + ((set >> a) & 1)];
      if (weight == 0.0) continue;
      const double* d = &data_[(node * subsets_ + set) * nf_ + first];
      for (int f = 0; f < count; ++f) out[f] += weight * d[f];
    }
  }
}

HeightJet GridField::jet(const Vector& x) const {
  if (!valid_.contains(x)) throw OutOfChart("grid field: point outside the sampled region");
  const int m = lattice_.dim();
  const int c = codim_;
  std::vector<double> buf(nf_);
  interpolate(x, 0, nf_, buf.data());
  HeightJet j;
  j.value = Eigen::Map<const Vector>(buf.data(), c);
  j.grad.resize(m, c);
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < c; ++a) j.grad(i, a) = buf[c + i * c + a];
  }
  j.hess.assign(c, Matrix(m, m));
  for (int i = 0; i < m; ++i) {
    for (int jj = 0; jj < m; ++jj) {
      for (int a = 0; a < c; ++a) j.hess[a](i, jj) = buf[c * (1 + m) + (i * m + jj) * c + a];
    }
  }
  for (int a = 0; a < c; ++a) j.hess[a] = 0.5 * (j.hess[a] + j.hess[a].transpose()).eval();
  return j;
}

Vector GridField::value(const Vector& x) const {
  if (!valid_.contains(x)) throw OutOfChart("grid field: point outside the sampled region");
  Vector v(codim_);
  interpolate(x, 0, codim_, v.data());
  return v;
}

std::optional<ThirdDerivatives> GridField::third(const Vector& x) const {
  if (!valid_.contains(x)) throw OutOfChart("grid field: point outside the sampled region");
  const int m = lattice_.dim();
  const int c = codim_;
  const int first = c * (1 + m);
  ThirdDerivatives t(c, std::vector<Matrix>(m, Matrix(m, m)));
  std::vector<double> buf(m * m * c);
  for (int i = 0; i < m; ++i) {
    interpolate(x, first, m * m * c, buf.data(), i);
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int a = 0; a < c; ++a) t[a][i](j, k) = buf[(j * m + k) * c + a];
      }
    }
  }
  return t;
}

GridField GridField::from_samples(const Lattice& lattice, int codim, const std::vector<double>& values) {
  const int m = lattice.dim();
  if (values.size() != lattice.size() * codim) throw Error("grid samples: size mismatch");
  Lattice inner = lattice;
  for (int a = 0; a < m; ++a) {
    inner.counts[a] = lattice.counts[a] - 4;
    inner.origin[a] = lattice.origin[a] + 2.0 * lattice.spacing[a];
    if (inner.counts[a] < 4) throw DomainTooSmall("grid samples: need at least 8 samples per axis");
  }
  const std::size_t n = inner.size();
  std::vector<double> val(n * codim), grad(n * m * codim), hess(n * m * m * codim);

  const std::array<double, 5> d1 = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  const std::array<double, 5> d2 = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

  std::vector<int> k(m, 0);
  std::vector<int> src(m);
  const auto sample = [&](const std::vector<int>& at, int a) {
    return values[lattice.flat_index(at) * codim + a];
  };
  for (std::size_t node = 0; node < n; ++node) {
    for (int a = 0; a < m; ++a) src[a] = k[a] + 2;
    const std::size_t out = inner.flat_index(k);
    for (int c = 0; c < codim; ++c) {
      val[out * codim + c] = sample(src, c);
      for (int i = 0; i < m; ++i) {
        double di = 0.0;
        std::vector<int> p = src;
        for (int s = 0; s < 5; ++s) {
          p[i] = src[i] + s - 2;
          di += d1[s] * sample(p, c);
        }
        grad[(out * m + i) * codim + c] = di / lattice.spacing[i];
        for (int j = 0; j < m; ++j) {
          double dij = 0.0;
          if (i == j) {
            std::vector<int> q = src;
            for (int s = 0; s < 5; ++s) {
              q[i] = src[i] + s - 2;
              dij += d2[s] * sample(q, c);
            }
            dij /= lattice.spacing[i] * lattice.spacing[i];
          } else {
            std::vector<int> q = src;
            for (int s = 0; s < 5; ++s) {
              for (int t = 0; t < 5; ++t) {
                if (d1[s] == 0.0 || d1[t] == 0.0) continue;
                q[i] = src[i] + s - 2;
                q[j] = src[j] + t - 2;
                dij += d1[s] * d1[t] * sample(q, c);
              }
            }
            dij /= lattice.spacing[i] * lattice.spacing[j];
          }
          hess[((out * m + i) * m + j) * codim + c] = dij;
        }
      }
    }
    int a = 0;
    while (a < m && ++k[a] == inner.counts[a]) k[a++] = 0;
  }
  const int nf = jet_field_size(m, codim);
  std::vector<double> fields(n * nf);
  for (std::size_t node = 0; node < n; ++node) {
    double* f = &fields[node * nf];
    std::copy_n(&val[node * codim], codim, f);
    std::copy_n(&grad[node * m * codim], m * codim, f + codim);
    std::copy_n(&hess[node * m * m * codim], m * m * codim, f + codim * (1 + m));
  }
  // Slopes of value and gradient are the next field up; only the Hessian
  // field is differenced (centrally, one-sided on the boundary layer).
  const int hess_first = codim * (1 + m);
  const int nh = m * m * codim;
  std::vector<double> slopes(n * m * nf);
  std::fill(k.begin(), k.end(), 0);
  for (std::size_t node = 0; node < n; ++node) {
    const double* f = &fields[node * nf];
    for (int a = 0; a < m; ++a) {
      double* sl = &slopes[(node * m + a) * nf];
      for (int c = 0; c < codim; ++c) sl[c] = f[codim + a * codim + c];
      for (int i = 0; i < m; ++i) {
        for (int c = 0; c < codim; ++c) sl[codim + i * codim + c] = f[hess_first + (i * m + a) * codim + c];
      }
      std::vector<int> lo = k, hi = k;
      if (k[a] > 0) --lo[a];
      if (k[a] < inner.counts[a] - 1) ++hi[a];
      const double h = (hi[a] - lo[a]) * inner.spacing[a];
      const double* fl = &fields[inner.flat_index(lo) * nf + hess_first];
      const double* fh = &fields[inner.flat_index(hi) * nf + hess_first];
      for (int q = 0; q < nh; ++q) sl[hess_first + q] = (fh[q] - fl[q]) / h;
    }
    int a = 0;
    while (a < m && ++k[a] == inner.counts[a]) k[a++] = 0;
  }
  return GridField(inner, codim, std::move(fields), std::move(slopes));
}

GraphSurface make_grid_surface(const Lattice& lattice, int codim, const std::vector<double>& values,
                               Regularity regularity, std::string name) {
  auto field = std::make_shared<GridField>(GridField::from_samples(lattice, codim, values));
  ChartDomain box = field->lattice().box();
  return GraphSurface(std::move(field), std::move(box), regularity, std::move(name));
}

}  // namespace geoflow
