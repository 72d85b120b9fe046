#pragma once

#include "geoflow/grid.hpp"
#include "geoflow/surface.hpp"

#include <optional>
#include <vector>

namespace geoflow {

// Unnormalized radial bump exp(-1 / (1 - |u|^2)) on the unit ball, 0 outside.
double bump(double r2);

// Integral of bump over the unit ball in R^dim (adaptive quadrature).
double bump_mass(int dim);

struct MollifyOptions {
  // Lattice spacing is eps / nodes_per_radius.
  int nodes_per_radius = 8;
  // Output region; defaults to the whole chart domain. Always intersected
  // with the domain shrunk by eps.
  std::optional<ChartDomain> region;
  // Pin h_eps(0) to h(0) (or the value at the node nearest the region center
  // when the origin is outside).
  bool normalize = true;
};

// Discrete weights of the normalized kernel on the offsets k * spacing with
// |k * spacing| < eps. Weights sum to one; gradients are those of the same
// normalized kernel.
struct KernelStencil {
  std::vector<std::vector<int>> offsets;
  std::vector<double> weights;
  std::vector<Vector> gradients;
};
KernelStencil kernel_stencil(int dim, double eps, double spacing);

// h * rho_eps sampled on an origin-aligned lattice and interpolated; tagged
// Smooth. Throws DomainTooSmall when nothing remains after shrinking by eps.
GraphSurface mollify(const GraphSurface& surface, double eps, const MollifyOptions& opts = {});

}  // namespace geoflow
