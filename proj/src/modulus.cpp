#include "geoflow/modulus.hpp"

#include "geoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace geoflow {

Modulus Modulus::linear(double c) {
  if (!(c >= 0.0)) throw ConfigError("modulus: constant must be nonnegative");
  Modulus m;
  m.kind_ = Kind::Linear;
  m.scale_ = c;
  return m;
}

Modulus Modulus::power(double c, double alpha) {
  if (!(c >= 0.0)) throw ConfigError("modulus: constant must be nonnegative");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("modulus: exponent must lie in (0, 1]");
  Modulus m;
  m.kind_ = Kind::Power;
  m.scale_ = c;
  m.alpha_ = alpha;
  return m;
}

Modulus Modulus::empirical(std::vector<double> upper_edges, std::vector<double> values,
                           std::vector<bool> populated) {
  if (upper_edges.size() != values.size() || populated.size() != values.size() || values.empty()) {
    throw Error("modulus: edges, values and flags must have equal nonzero length");
  }
  Modulus m;
  m.kind_ = Kind::Empirical;
  double run = 0.0;
  for (double& v : values) {
    run = std::max(run, v);
    v = run;
  }
  m.edges_ = std::move(upper_edges);
  m.values_ = std::move(values);
  m.populated_ = std::move(populated);
  return m;
}

Modulus Modulus::propagated(double c_tilde, double c_bar, double t1, const Modulus& inner) {
  if (!(t1 > 0.0)) throw ConfigError("osgood_gamma: t1 must be positive");
  Modulus m;
  m.kind_ = Kind::Propagated;
  m.scale_ = c_tilde * t1 * std::exp(c_bar * t1);
  m.inner_ = std::make_shared<const Modulus>(inner);
  m.alpha_ = inner.alpha_;
  return m;
}

double Modulus::operator()(double delta) const {
  if (delta <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Linear:
      return scale_ * delta;
    case Kind::Power:
      return scale_ * std::pow(delta, alpha_);
    case Kind::Propagated:
      return scale_ * (*inner_)(delta);
    case Kind::Empirical: {
      // Piecewise linear through (0, 0) and the bin upper edges, constant beyond.
      const auto it = std::lower_bound(edges_.begin(), edges_.end(), delta);
      if (it == edges_.end()) return values_.back();
      const std::size_t i = static_cast<std::size_t>(it - edges_.begin());
      const double x0 = i == 0 ? 0.0 : edges_[i - 1];
      const double y0 = i == 0 ? 0.0 : values_[i - 1];
      const double s = (delta - x0) / (edges_[i] - x0);
      return y0 + s * (values_[i] - y0);
    }
  }
  return 0.0;
}

bool Modulus::osgood_divergent() const {
  switch (kind_) {
    case Kind::Linear:
      return true;
    case Kind::Power:
      return alpha_ >= 1.0 || scale_ == 0.0;
    case Kind::Propagated:
      return scale_ == 0.0 || inner_->osgood_divergent();
    case Kind::Empirical:
      // Linear near zero by construction.
      return true;
  }
  return true;
}

void Modulus::write_csv(std::ostream& out) const {
  out << "delta,mu\n";
  char buf[64];
  std::vector<double> grid = edges_;
  if (grid.empty() && kind_ == Kind::Propagated) grid = inner_->edges_;
  if (grid.empty()) grid = log_bin_edges({32, 1e-6, 1.0});
  for (double d : grid) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d, (*this)(d));
    out << buf;
  }
}

std::vector<double> log_bin_edges(const ModulusBins& bins) {
  const double hi = bins.delta_max > 0.0 ? bins.delta_max : 1.0;
  if (bins.bins < 1) throw ConfigError("modulus: need at least one bin");
  if (!(hi > bins.delta_min && bins.delta_min > 0.0)) throw ConfigError("modulus: need 0 < delta_min < delta_max");
  std::vector<double> edges(bins.bins);
  const double ratio = std::log(hi / bins.delta_min);
  for (int k = 0; k < bins.bins; ++k) {
    edges[k] = bins.delta_min * std::exp(ratio * (k + 1) / bins.bins);
  }
  edges.back() = hi;
  return edges;
}

Modulus modulus_from_gaps(const std::vector<std::pair<double, double>>& gaps, const ModulusBins& bins) {
  ModulusBins b = bins;
  if (b.delta_max <= 0.0) {
    for (const auto& g : gaps) b.delta_max = std::max(b.delta_max, g.first);
    if (b.delta_max <= b.delta_min) b.delta_max = 10.0 * b.delta_min;
  }
  const std::vector<double> edges = log_bin_edges(b);
  std::vector<double> values(edges.size(), 0.0);
  std::vector<bool> populated(edges.size(), false);
  for (const auto& [delta, dev] : gaps) {
    if (delta > edges.back()) continue;
    std::size_t i = 0;
    if (delta > b.delta_min) {
      i = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), delta) - edges.begin());
    }
    values[i] = std::max(values[i], dev);
    populated[i] = true;
  }
  return Modulus::empirical(edges, std::move(values), std::move(populated));
}

Modulus empirical_modulus(const std::vector<std::pair<Vector, Vector>>& samples, const ModulusBins& bins) {
  if (samples.size() < 2) throw Error("empirical_modulus: need at least two samples");
  std::vector<std::pair<double, double>> gaps;
  gaps.reserve(samples.size() * (samples.size() - 1) / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      gaps.emplace_back((samples[i].first - samples[j].first).norm(),
                        (samples[i].second - samples[j].second).norm());
    }
  }
  return modulus_from_gaps(gaps, bins);
}

}  // namespace geoflow
