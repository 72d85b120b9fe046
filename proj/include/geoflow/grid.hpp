#pragma once

#include "geoflow/surface.hpp"

#include <cstddef>
#include <vector>

namespace geoflow {

// Regular lattice origin + k * spacing, k in [0, counts).
struct Lattice {
  Vector origin;
  Vector spacing;
  std::vector<int> counts;

  int dim() const { return static_cast<int>(counts.size()); }
  std::size_t size() const;
  std::size_t flat_index(const std::vector<int>& k) const;
  Vector point(const std::vector<int>& k) const;
  ChartDomain box() const;
};

// Number of doubles per node in the field layout used by GridField:
// value (c), grad (m*c, index i*c + a), hess (m*m*c, index (i*m + j)*c + a).
int jet_field_size(int dim, int codim);

// Height function stored as node values of h, Dh and D^2h, evaluated by
// tensor-product cubic Hermite interpolation (C^1 across cells).
class GridField : public HeightField {
 public:
  // `fields` is node-major with jet_field_size() doubles per node. `slopes`
  // holds the derivative of every field along every axis, indexed
  // (node * m + axis) * nf + f; when empty it is estimated by central
  // differences. Mixed derivatives are always estimated by differences.
  GridField(Lattice lattice, int codim, std::vector<double> fields, std::vector<double> slopes = {});

  // Derivatives from fourth-order central differences of the samples. The
  // result drops the two outermost node layers on every side.
  static GridField from_samples(const Lattice& lattice, int codim, const std::vector<double>& values);

  int dim() const override { return lattice_.dim(); }
  int codim() const override { return codim_; }
  HeightJet jet(const Vector& x) const override;
  Vector value(const Vector& x) const override;
  // Derivative of the interpolated Hessian field.
  std::optional<ThirdDerivatives> third(const Vector& x) const override;

  const Lattice& lattice() const { return lattice_; }
  // Restricts evaluation to this domain (nodes outside it may hold NaN).
  void set_valid_domain(ChartDomain d) { valid_ = std::move(d); }
  const ChartDomain& valid_domain() const { return valid_; }

 private:
  void interpolate(const Vector& x, int first, int count, double* out, int deriv_axis = -1) const;

  Lattice lattice_;
  int codim_;
  int nf_;
  int subsets_;
  std::vector<double> data_;  // (node * subsets + S) * nf + f
  ChartDomain valid_;
};

// Grid surface from codimension-c samples on a lattice; the usable domain is
// the lattice box shrunk by the finite-difference stencil.
GraphSurface make_grid_surface(const Lattice& lattice, int codim, const std::vector<double>& values,
                               Regularity regularity, std::string name = "grid");

}  // namespace geoflow
