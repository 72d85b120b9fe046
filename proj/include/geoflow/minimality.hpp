#pragma once

#include "geoflow/flow.hpp"
#include "geoflow/grid.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace geoflow {

// sec(pi / 8): worst ratio of king-move path length to Euclidean length in the plane.
inline constexpr double kKingMoveAnisotropy = 1.0823922002923940;

// Weighted graph on the chart lattice with `resolution` cells per axis.
// Vertices are lattice points inside the domain; every vertex connects to
// its 3^m - 1 neighbours by the ambient chord between embedded points.
class MeshGeodesicOracle {
 public:
  MeshGeodesicOracle(const GraphSurface& surface, int resolution);

  int resolution() const { return resolution_; }
  const Lattice& lattice() const { return lattice_; }
  // Largest lattice spacing.
  double step() const { return lattice_.spacing.maxCoeff(); }
  std::size_t vertex_count() const { return lattice_.size(); }
  bool active(std::size_t v) const { return active_[v]; }
  Vector vertex(std::size_t v) const;
  const Vector& embedded(std::size_t v) const { return embedded_[v]; }

  // Integer offsets of the neighbourhood, and the weight of edge (v, v + offset k)
  // (negative when either end is inactive or off the lattice).
  const std::vector<std::vector<int>>& offsets() const { return offsets_; }
  double weight(std::size_t v, std::size_t k) const { return weights_[v * offsets_.size() + k]; }
  std::size_t neighbour(std::size_t v, std::size_t k) const;

  // Nearest active vertex; throws OutOfChart when x is outside the domain.
  std::size_t snap(const Vector& x) const;

  // sqrt(1 + G^2) and H from the surface bounds (G = sup |Dh|, H = sup |D^2h|).
  double slope_factor() const { return slope_factor_; }
  double hess_bound() const { return hess_bound_; }

 private:
  int resolution_;
  Lattice lattice_;
  std::vector<bool> active_;
  std::vector<Vector> embedded_;
  std::vector<std::vector<int>> offsets_;
  std::vector<std::ptrdiff_t> strides_;
  std::vector<double> weights_;
  double slope_factor_ = 1.0;
  double hess_bound_ = 0.0;
};

// Throws ConfigError for resolution < 8.
MeshGeodesicOracle build_mesh_oracle(const GraphSurface& surface, int resolution);

struct MeshPath {
  double length = 0.0;
  std::size_t hops = 0;
  // Chart distances from the query points to their snapped vertices.
  double snap_p = 0.0;
  double snap_q = 0.0;
};

MeshPath shortest_path(const MeshGeodesicOracle& oracle, const Vector& p, const Vector& q);
double shortest_path_length(const MeshGeodesicOracle& oracle, const Vector& p, const Vector& q);

// Sum of ambient chords between consecutive embedded samples.
double curve_length(const GraphSurface& surface, const std::vector<Vector>& samples);
// Chord length of the trajectory sampled from its dense output at spacing <= 1e-3
// (the stored samples when there is no dense output).
double curve_length(const GraphSurface& surface, const Trajectory& traj);

struct MinimalityReport {
  double geodesic_length = 0.0;
  double mesh_length = 0.0;
  // How far the mesh distance may fall below the intrinsic distance: snapping
  // (slope factor times snap distances) plus chord deficits (H^2 l^3 / 8 per hop).
  double error_budget = 0.0;
  double margin = 0.0;  // mesh_length + error_budget - geodesic_length
  std::size_t hops = 0;
  bool holds() const { return margin >= 0.0; }
};

MinimalityReport minimality_report(const GraphSurface& surface, const Trajectory& traj,
                                   const MeshGeodesicOracle& oracle);
// Throws OutOfDomain when the trajectory did not complete.
double minimality_margin(const GraphSurface& surface, const Trajectory& traj, const MeshGeodesicOracle& oracle);

struct BranchingReport {
  std::vector<double> steps;
  std::vector<Vector> endpoints;
  std::vector<double> spreads;  // |end_k+1 - end_k|
  bool spread_shrinks = false;
  std::vector<double> quotients;
  double c_bar = 0.0;
  double bound = 0.0;  // exp(c_bar t)
  bool quotients_bounded = false;
};

// Spreads are accepted as shrinking when non-increasing or all below `floor`.
BranchingReport branching_check(const GraphSurface& surface, const TangentVector& v, double t_end,
                                const std::vector<double>& steps, const std::vector<Vector>& perturbations,
                                double floor = 1e-13);

// Sup of |sectional curvature| over the domain sample grid.
double sampled_curvature_bound(const GraphSurface& surface, int per_axis = 33);

// Random unit-speed geodesics of length at most half of min(pi / C, inradius)
// that stay in the chart. `min_fraction` sets the lower end of the length range.
std::vector<Trajectory> random_short_geodesics(const GraphSurface& surface, int count, std::mt19937_64& rng,
                                               double min_fraction = 0.3, const FlowOptions& opts = {});

}  // namespace geoflow
