#include "geoflow/minimality.hpp"

#include "geoflow/errors.hpp"
#include "geoflow/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace geoflow {

namespace {

std::vector<int> unflatten(std::size_t v, const std::vector<int>& counts) {
  std::vector<int> k(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    k[a] = static_cast<int>(v % counts[a]);
    v /= counts[a];
  }
  return k;
}

}  // namespace

MeshGeodesicOracle::MeshGeodesicOracle(const GraphSurface& surface, int resolution) : resolution_(resolution) {
  if (resolution < 8) throw ConfigError("mesh oracle: resolution must be at least 8");
  const ChartDomain& dom = surface.domain();
  const int m = surface.dim();
  lattice_.origin = dom.lower();
  lattice_.spacing = (dom.upper() - dom.lower()) / resolution;
  lattice_.counts.assign(m, resolution + 1);

  const std::size_t n = lattice_.size();
  active_.assign(n, false);
  embedded_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const Vector x = vertex(v);
    if (!dom.contains(x)) continue;
    active_[v] = true;
    embedded_[v] = embed(surface, x);
  }

  std::ptrdiff_t stride = 1;
  for (int a = 0; a < m; ++a) {
    strides_.push_back(stride);
    stride *= lattice_.counts[a];
  }
  std::size_t total = 1;
  for (int a = 0; a < m; ++a) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> off(m);
    std::size_t c = code;
    bool zero = true;
    for (int a = 0; a < m; ++a) {
      off[a] = static_cast<int>(c % 3) - 1;
      c /= 3;
      zero = zero && off[a] == 0;
    }
    if (!zero) offsets_.push_back(off);
  }

  weights_.assign(n * offsets_.size(), -1.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!active_[v]) continue;
    const std::vector<int> k = unflatten(v, lattice_.counts);
    for (std::size_t o = 0; o < offsets_.size(); ++o) {
      bool inside = true;
      for (int a = 0; a < m; ++a) {
        const int kk = k[a] + offsets_[o][a];
        inside = inside && kk >= 0 && kk < lattice_.counts[a];
      }
      if (!inside) continue;
      const std::size_t w = neighbour(v, o);
      if (active_[w]) weights_[v * offsets_.size() + o] = (embedded_[w] - embedded_[v]).norm();
    }
  }

  const SurfaceBounds& b = surface.bounds();
  slope_factor_ = std::sqrt(1.0 + b.grad * b.grad);
  hess_bound_ = b.hess;
}

Vector MeshGeodesicOracle::vertex(std::size_t v) const { return lattice_.point(unflatten(v, lattice_.counts)); }

std::size_t MeshGeodesicOracle::neighbour(std::size_t v, std::size_t k) const {
  std::ptrdiff_t w = static_cast<std::ptrdiff_t>(v);
  for (std::size_t a = 0; a < strides_.size(); ++a) w += offsets_[k][a] * strides_[a];
  return static_cast<std::size_t>(w);
}

std::size_t MeshGeodesicOracle::snap(const Vector& x) const {
  if (x.size() != lattice_.dim()) throw Error("mesh oracle: point has the wrong dimension");
  if (!lattice_.box().contains(x)) throw OutOfChart("mesh oracle: point outside the chart");
  std::vector<int> k(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    const double r = std::round((x[a] - lattice_.origin[a]) / lattice_.spacing[a]);
    k[a] = std::clamp(static_cast<int>(r), 0, lattice_.counts[a] - 1);
  }
  const std::size_t v = lattice_.flat_index(k);
  if (active_[v]) return v;
  // Near a curved boundary: fall back to a scan.
  std::size_t best = vertex_count();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < vertex_count(); ++w) {
    if (!active_[w]) continue;
    const double d = (vertex(w) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = w;
    }
  }
  if (best == vertex_count()) throw OutOfChart("mesh oracle: no active vertex");
  return best;
}

MeshGeodesicOracle build_mesh_oracle(const GraphSurface& surface, int resolution) {
  return MeshGeodesicOracle(surface, resolution);
}

MeshPath shortest_path(const MeshGeodesicOracle& oracle, const Vector& p, const Vector& q) {
  const std::size_t src = oracle.snap(p);
  const std::size_t dst = oracle.snap(q);
  MeshPath out;
  out.snap_p = (oracle.vertex(src) - p).norm();
  out.snap_q = (oracle.vertex(dst) - q).norm();
  if (src == dst) return out;

  const std::size_t n = oracle.vertex_count();
  const std::size_t deg = oracle.offsets().size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> hops(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[src] = 0.0;
  queue.emplace(0.0, src);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    if (v == dst) break;
    for (std::size_t k = 0; k < deg; ++k) {
      const double w = oracle.weight(v, k);
      if (w < 0.0) continue;
      const std::size_t u = oracle.neighbour(v, k);
      if (d + w < dist[u]) {
        dist[u] = d + w;
        hops[u] = hops[v] + 1;
        queue.emplace(dist[u], u);
      }
    }
  }
  if (!std::isfinite(dist[dst])) throw Disconnected("mesh oracle: endpoints are not connected");
  out.length = dist[dst];
  out.hops = hops[dst];
  return out;
}

double shortest_path_length(const MeshGeodesicOracle& oracle, const Vector& p, const Vector& q) {
  return shortest_path(oracle, p, q).length;
}

double curve_length(const GraphSurface& surface, const std::vector<Vector>& samples) {
  if (samples.size() < 2) throw Error("curve_length: need at least two samples");
  double total = 0.0;
  Vector prev = embed(surface, samples.front());
  for (std::size_t i = 1; i < samples.size(); ++i) {
    Vector cur = embed(surface, samples[i]);
    total += (cur - prev).norm();
    prev = std::move(cur);
  }
  return total;
}

double curve_length(const GraphSurface& surface, const Trajectory& traj) {
  if (traj.raw.times.empty()) {
    // No dense output (hand-built curves): use the samples as given.
    std::vector<Vector> pts;
    for (const PhaseState& s : traj.states) pts.push_back(s.x);
    return curve_length(surface, pts);
  }
  const double t = traj.t_final();
  const std::size_t n = std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(t / 1e-3)));
  std::vector<Vector> pts;
  pts.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) pts.push_back(traj.at(t * static_cast<double>(i) / n).x);
  return curve_length(surface, pts);
}

MinimalityReport minimality_report(const GraphSurface& surface, const Trajectory& traj,
                                   const MeshGeodesicOracle& oracle) {
  if (traj.exit_reason != ExitReason::Completed) throw OutOfDomain("minimality: trajectory left the chart");
  MinimalityReport r;
  r.geodesic_length = curve_length(surface, traj);
  const MeshPath path = shortest_path(oracle, traj.states.front().x, traj.final_state().x);
  r.mesh_length = path.length;
  r.hops = path.hops;
  const double edge = oracle.step() * std::sqrt(static_cast<double>(surface.dim()));
  const double h = oracle.hess_bound();
  r.error_budget = oracle.slope_factor() * (path.snap_p + path.snap_q) +
                   static_cast<double>(path.hops) * h * h * edge * edge * edge / 8.0;
  r.margin = r.mesh_length + r.error_budget - r.geodesic_length;
  return r;
}

double minimality_margin(const GraphSurface& surface, const Trajectory& traj, const MeshGeodesicOracle& oracle) {
  return minimality_report(surface, traj, oracle).margin;
}

BranchingReport branching_check(const GraphSurface& surface, const TangentVector& v, double t_end,
                                const std::vector<double>& steps, const std::vector<Vector>& perturbations,
                                double floor) {
  if (steps.size() < 2) throw ConfigError("branching_check: need at least two step sizes");
  BranchingReport rep;
  rep.steps = steps;
  for (double h : steps) {
    FlowOptions fo;
    fo.method = StepMethod::FixedRK4;
    fo.fixed_step = h;
    const Trajectory tr = integrate_geodesic(surface, v, t_end, fo);
    if (tr.exit_reason != ExitReason::Completed) throw OutOfDomain("branching_check: geodesic left the chart");
    rep.endpoints.push_back(tr.final_state().stacked());
  }
  bool all_floor = true;
  rep.spread_shrinks = true;
  for (std::size_t k = 0; k + 1 < rep.endpoints.size(); ++k) {
    rep.spreads.push_back((rep.endpoints[k + 1] - rep.endpoints[k]).norm());
    all_floor = all_floor && rep.spreads.back() <= floor;
    if (k > 0 && rep.spreads[k] > rep.spreads[k - 1] && rep.spreads[k] > floor) rep.spread_shrinks = false;
  }
  rep.spread_shrinks = rep.spread_shrinks || all_floor;

  FlowOptions fine;
  fine.method = StepMethod::FixedRK4;
  fine.fixed_step = *std::min_element(steps.begin(), steps.end());
  const Probe probe{t_end, v};
  for (const Vector& d : perturbations) {
    const QuotientSample s = lipschitz_quotient(surface, probe, d, fine);
    rep.quotients.push_back(s.quotient);
    rep.c_bar = std::max(rep.c_bar, s.c_bar);
  }
  rep.bound = std::exp(rep.c_bar * t_end);
  rep.quotients_bounded =
      std::all_of(rep.quotients.begin(), rep.quotients.end(), [&](double q) { return q <= rep.bound; });
  return rep;
}

double sampled_curvature_bound(const GraphSurface& surface, int per_axis) {
  const int m = surface.dim();
  double sup = 0.0;
  for (const Vector& x : sample_domain(surface.domain(), per_axis)) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        sup = std::max(sup, std::abs(sectional_curvature(surface, x, Vector::Unit(m, i), Vector::Unit(m, j))));
      }
    }
  }
  return sup;
}

std::vector<Trajectory> random_short_geodesics(const GraphSurface& surface, int count, std::mt19937_64& rng,
                                               double min_fraction, const FlowOptions& opts) {
  const int m = surface.dim();
  const ChartDomain& dom = surface.domain();
  const double c = sampled_curvature_bound(surface);
  const double radius = dom.inradius();
  const double max_len = 0.5 * (c > 0.0 ? std::min(std::numbers::pi / c, radius) : radius);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::vector<Trajectory> out;
  const int max_attempts = 1000 * std::max(count, 1);
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
    Vector x(m);
    for (int a = 0; a < m; ++a) x[a] = dom.lower()[a] + uni(rng) * dom.width(a);
    Vector y(m);
    for (int a = 0; a < m; ++a) y[a] = normal(rng);
    const double len = max_len * (min_fraction + (1.0 - min_fraction) * uni(rng));
    if (!dom.contains(x) || y.norm() < 1e-12) continue;
    y /= g_norm(surface, x, y);
    Trajectory tr = integrate_geodesic(surface, {x, y}, len, opts);
    if (tr.exit_reason == ExitReason::Completed) out.push_back(std::move(tr));
  }
  if (static_cast<int>(out.size()) < count) throw OutOfDomain("random_short_geodesics: could not place geodesics");
  return out;
}

}  // namespace geoflow
