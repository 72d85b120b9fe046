#pragma once

#include "geoflow/jacobi.hpp"
#include "geoflow/modulus.hpp"
#include "geoflow/mollify.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace geoflow {

// Operator norm of (u, v) -> Pi(u, v) for chart unit vectors (exact in
// codimension one, an upper bound otherwise).
double second_fundamental_norm(const PointGeometry& pg);

struct SequenceOptions {
  MollifyOptions mollify;
  int samples_per_axis = 65;
};

struct SmoothingSequence {
  GraphSurface base;
  std::vector<double> scales;
  std::vector<GraphSurface> smoothed;
  // Region where every level and the base are evaluated.
  ChartDomain common;
  // Per level, distances to the base over the sample grid.
  std::vector<double> height_c1;
  std::vector<double> metric_c1;
  std::vector<double> pi_c0;
  std::vector<double> pi_sup;
  double pi_bound = 0.0;  // max of pi_sup
};

// Throws ConfigError unless scales are strictly decreasing and positive.
SmoothingSequence approximation_sequence(const GraphSurface& surface, const std::vector<double>& scales,
                                         const SequenceOptions& opts = {});

struct Probe {
  double t;
  TangentVector v;
};

// A distance sequence converges when it is strictly decreasing with
// geometric-mean decrease factor >= min_factor; entries at or below `floor`
// count as converged.
struct ConvergenceRule {
  double min_factor = 1.5;
  double floor = 1e-9;
};

struct RuleOutcome {
  bool decreasing = false;
  bool converging = false;
  double mean_factor = 0.0;
};

RuleOutcome apply_rule(const std::vector<double>& distances, const ConvergenceRule& rule = {});

struct ConvergenceReport {
  std::vector<double> scales;
  std::vector<double> metric_c1;
  std::vector<double> pi_c0;
  double pi_bound = 0.0;
  // Successive sup-distances between levels l and l + 1.
  std::vector<double> flow_c0;
  std::vector<double> dflow_c0;
  RuleOutcome flow;
  RuleOutcome dflow;
  double dflow_bound = 0.0;  // max of dflow_c0
  std::size_t probes_used = 0;
  std::vector<std::size_t> pruned;
  std::string verdict;  // "converging", "flow-only", "not-converging"
};

ConvergenceReport flow_convergence_report(const SmoothingSequence& seq, const std::vector<Probe>& probes,
                                          const ConvergenceRule& rule = {}, const JacobiOptions& opts = {});

// x0_norm * exp(c_bar * t)
double gronwall_bound(double c_bar, double x0_norm, double t);

// Gamma(delta) = c_tilde * t1 * exp(c_bar * t1) * mu_R(delta)
Modulus osgood_gamma(const Modulus& mu_r, double c_tilde, double c_bar, double t1);

// min(pi / C, l / 2)
double injradius_lower_bound(double c, double l);

enum class Verdict { Holds, Violated, Inconclusive };
const char* verdict_name(Verdict v);

struct OsgoodCheck {
  Verdict verdict = Verdict::Inconclusive;
  // min over samples of (t - t0) - int_a^L ds / mu(s); for a = 0 the
  // negated sup of L.
  double margin = 0.0;
};

// Checks int_a^{L(t)} ds / mu(s) <= t - t0 at every sample.
OsgoodCheck osgood_integral_check(const std::vector<double>& times, const std::vector<double>& values, double a,
                                  const Modulus& mu, double tol = 1e-9);

struct HolderCheck {
  bool holds = true;
  // max over populated bins of modulus / (c_bound * edge^alpha)
  double worst_ratio = 0.0;
};

HolderCheck holder_modulus_check(const Modulus& empirical, double alpha, double c_bound);
HolderCheck holder_modulus_check(const std::vector<std::pair<double, double>>& gaps, double alpha, double c_bound,
                                 const ModulusBins& bins = {});

// ---- Experiments on the joint geodesic / Jacobi system ----

// Spectral norm of the Jacobi coefficient matrix and of the Jacobi state,
// sampled at the integrator's time points.
struct GronwallSample {
  double t = 0.0;
  double x0_norm = 0.0;
  double c_bar = 0.0;
  double sup_ratio = 0.0;  // max over samples of |X(s)| / (|X0| exp(c_bar s))
  bool dominated = false;
};

GronwallSample gronwall_dominance(const GraphSurface& surface, const TangentVector& v, const JacobiState& x0,
                                  double t, const JacobiOptions& opts = {});

// Pair of runs from base points x0 and x0 + delta u with equal velocity and
// Jacobi data, integrated by RK4 on one time grid.
struct ParameterPair {
  double delta = 0.0;
  double coeff_gap = 0.0;  // max over the grid of |R(s, x0) - R(s, x0')|
  double state_gap = 0.0;  // |X(t1, x0) - X(t1, x0')|
};

struct DependenceOptions {
  double t1 = 0.3;
  int pairs = 200;
  double delta_min = 1e-6;
  double delta_max = 0.05;
  double rk4_step = 1e-3;
  // Base points are drawn uniformly from this box.
  Vector center;
  double half_width = 0.2;
  Vector velocity;      // chart velocity; default (1, ..., 1) / sqrt(m)
  JacobiState initial;  // default (0, velocity default)
};

struct PairRun {
  std::vector<double> times;
  std::vector<double> state_gaps;  // |X(s, x0) - X(s, x0')| on the grid
  double coeff_gap = 0.0;
  double c_tilde = 0.0;
  double c_bar = 0.0;
};

PairRun run_parameter_pair(const GraphSurface& surface, const Vector& x0, const Vector& x0_other,
                           const DependenceOptions& opts);

struct DependenceSample {
  std::vector<ParameterPair> pairs;
  double c_tilde = 0.0;  // sup |X| over all runs
  double c_bar = 0.0;    // sup |R| over all runs
  double t1 = 0.0;
};

DependenceSample parameter_dependence(const GraphSurface& surface, const DependenceOptions& opts,
                                      std::mt19937_64& rng);

struct OsgoodDominance {
  Modulus mu_r;
  Modulus observed;
  Modulus gamma;
  std::size_t populated = 0;
  double worst_ratio = 0.0;  // max over populated bins of observed / gamma
  bool dominated = false;
  DependenceSample sample;
};

OsgoodDominance osgood_dominance(const DependenceSample& sample, const ModulusBins& bins = {});

struct HolderExperiment {
  double alpha = 0.0;
  double coeff_holder = 0.0;  // sup coeff_gap / delta^alpha
  double c_bound = 0.0;
  HolderCheck check;
  DependenceSample sample;
};

HolderExperiment holder_experiment(const DependenceSample& sample, double alpha, const ModulusBins& bins = {});

// |P_t (phi(t, v) - phi(t, w))| / |P_0 (v - w)| with P the chart-to-(J, K)
// conversion along the first geodesic.
struct LipschitzReport {
  std::vector<double> quotients;
  double max_quotient = 0.0;
  double c_bar = 0.0;
  double bound = 0.0;  // exp(c_bar * t)
  bool bounded = false;
};

struct QuotientSample {
  double quotient = 0.0;
  double c_bar = 0.0;  // max |R| along both trajectories
};

// Quotient for w = v + perturbation (stacked chart coordinates). Throws
// OutOfDomain when either geodesic leaves the chart before probe.t.
QuotientSample lipschitz_quotient(const GraphSurface& surface, const Probe& probe, const Vector& perturbation,
                                  const FlowOptions& opts);

struct PerturbationOptions {
  int pairs = 200;
  double delta_min = 1e-5;
  double delta_max = 1e-3;
  double rk4_step = 1e-3;
};

LipschitzReport lipschitz_quotients(const GraphSurface& surface, const std::vector<Probe>& probes,
                                    const PerturbationOptions& opts, std::mt19937_64& rng);

}  // namespace geoflow
