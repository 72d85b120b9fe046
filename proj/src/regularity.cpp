#include "geoflow/regularity.hpp"

#include "geoflow/errors.hpp"
#include "geoflow/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace geoflow {

namespace {

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector u(n);
  do {
    for (int i = 0; i < n; ++i) u[i] = normal(rng);
  } while (u.norm() < 1e-12);
  return u / u.norm();
}

double log_uniform(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(std::log(lo), std::log(hi));
  return std::exp(uni(rng));
}

// d_k g_ij = sum_a hess^a_ik grad_ja + grad_ia hess^a_jk
std::vector<Matrix> metric_derivatives(const HeightJet& j) {
  const Eigen::Index m = j.grad.rows();
  std::vector<Matrix> d(m, Matrix::Zero(m, m));
  for (Eigen::Index k = 0; k < m; ++k) {
    for (std::size_t a = 0; a < j.hess.size(); ++a) {
      const Vector hk = j.hess[a].col(k);
      d[k] += hk * j.grad.col(a).transpose() + j.grad.col(a) * hk.transpose();
    }
  }
  return d;
}

}  // namespace

double second_fundamental_norm(const PointGeometry& pg) {
  const int m = pg.dim();
  const Matrix pn = pg.normal_projector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(pn);
  double total = 0.0;
  for (Eigen::Index col = 0; col < pn.rows(); ++col) {
    if (es.eigenvalues()[col] < 0.5) continue;
    const Vector nu = es.eigenvectors().col(col);
    Matrix comp(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) comp(i, j) = pg.second_fundamental_basis(i, j).dot(nu);
    }
    // Operator norm for chart-unit u, v.
    const double s = Eigen::SelfAdjointEigenSolver<Matrix>(comp).eigenvalues().cwiseAbs().maxCoeff();
    total += s * s;
  }
  return std::sqrt(total);
}

SmoothingSequence approximation_sequence(const GraphSurface& surface, const std::vector<double>& scales,
                                         const SequenceOptions& opts) {
  if (scales.empty()) throw ConfigError("approximation_sequence: no scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || (i > 0 && !(scales[i] < scales[i - 1]))) {
      throw ConfigError("approximation_sequence: scales must be positive and strictly decreasing");
    }
  }
  SmoothingSequence seq{surface, scales, {}, surface.domain(), {}, {}, {}, {}, 0.0};
  seq.smoothed.reserve(scales.size());
  for (double eps : scales) seq.smoothed.push_back(mollify(surface, eps, opts.mollify));
  for (const GraphSurface& s : seq.smoothed) seq.common = seq.common.intersect(s.domain());

  const std::vector<Vector> pts = sample_domain(seq.common, opts.samples_per_axis);
  const int m = surface.dim();
  const std::size_t levels = scales.size();
  seq.height_c1.assign(levels, 0.0);
  seq.metric_c1.assign(levels, 0.0);
  seq.pi_c0.assign(levels, 0.0);
  seq.pi_sup.assign(levels, 0.0);

  struct BaseData {
    HeightJet jet;
    Matrix g;
    std::vector<Matrix> dg;
    std::vector<Vector> pi;
  };
  std::vector<BaseData> base(pts.size());
  parallel_for(pts.size(), [&](std::size_t p) {
    const PointGeometry pg(surface, pts[p]);
    base[p] = {pg.jet(), pg.metric(), metric_derivatives(pg.jet()), {}};
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) base[p].pi.push_back(pg.second_fundamental_basis(i, j));
    }
  });

  for (std::size_t l = 0; l < levels; ++l) {
    const GraphSurface& s = seq.smoothed[l];
    std::vector<std::array<double, 6>> row(pts.size());
    parallel_for(pts.size(), [&](std::size_t p) {
      const PointGeometry pg(s, pts[p]);
      const BaseData& b = base[p];
      const HeightJet& j = pg.jet();
      const double h0 = (j.value - b.jet.value).cwiseAbs().maxCoeff();
      const double h1 = (j.grad - b.jet.grad).cwiseAbs().maxCoeff();
      const double g0 = (pg.metric() - b.g).cwiseAbs().maxCoeff();
      double g1 = 0.0;
      const std::vector<Matrix> dg = metric_derivatives(j);
      for (int k = 0; k < m; ++k) g1 = std::max(g1, (dg[k] - b.dg[k]).cwiseAbs().maxCoeff());
      double pi = 0.0;
      for (int i = 0; i < m; ++i) {
        for (int jj = 0; jj < m; ++jj) {
          pi = std::max(pi, (pg.second_fundamental_basis(i, jj) - b.pi[i * m + jj]).norm());
        }
      }
      row[p] = {h0, h1, g0, g1, pi, second_fundamental_norm(pg)};
    });
    std::array<double, 6> sup{};
    for (const auto& r : row) {
      for (int q = 0; q < 6; ++q) sup[q] = std::max(sup[q], r[q]);
    }
    seq.height_c1[l] = sup[0] + sup[1];
    seq.metric_c1[l] = sup[2] + sup[3];
    seq.pi_c0[l] = sup[4];
    seq.pi_sup[l] = sup[5];
  }
  seq.pi_bound = *std::max_element(seq.pi_sup.begin(), seq.pi_sup.end());
  return seq;
}

RuleOutcome apply_rule(const std::vector<double>& d, const ConvergenceRule& rule) {
  RuleOutcome out;
  if (d.empty()) return out;
  bool all_floor = true;
  out.decreasing = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > rule.floor) all_floor = false;
    if (i > 0 && !(d[i] < d[i - 1]) && d[i] > rule.floor) out.decreasing = false;
  }
  if (all_floor) {
    out.converging = true;
    out.mean_factor = std::numeric_limits<double>::infinity();
    return out;
  }
  if (d.size() == 1) {
    out.converging = false;
    return out;
  }
  const double first = std::max(d.front(), rule.floor);
  const double last = std::max(d.back(), rule.floor);
  out.mean_factor = std::pow(first / last, 1.0 / static_cast<double>(d.size() - 1));
  out.converging = out.decreasing && out.mean_factor >= rule.min_factor;
  return out;
}

ConvergenceReport flow_convergence_report(const SmoothingSequence& seq, const std::vector<Probe>& probes,
                                          const ConvergenceRule& rule, const JacobiOptions& opts) {
  ConvergenceReport rep;
  rep.scales = seq.scales;
  rep.metric_c1 = seq.metric_c1;
  rep.pi_c0 = seq.pi_c0;
  rep.pi_bound = seq.pi_bound;
  const std::size_t levels = seq.smoothed.size();

  // results[p][l]
  std::vector<std::vector<std::optional<FlowDifferential>>> results(probes.size());
  parallel_for(probes.size(), [&](std::size_t p) {
    results[p].resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
      try {
        results[p][l] = flow_differential(seq.smoothed[l], probes[p].t, probes[p].v, opts);
      } catch (const OutOfDomain&) {
        return;
      } catch (const OutOfChart&) {
        return;
      }
    }
  });

  rep.flow_c0.assign(levels > 0 ? levels - 1 : 0, 0.0);
  rep.dflow_c0.assign(rep.flow_c0.size(), 0.0);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const bool ok = std::all_of(results[p].begin(), results[p].end(), [](const auto& r) { return r.has_value(); });
    if (!ok) {
      rep.pruned.push_back(p);
      continue;
    }
    ++rep.probes_used;
    for (std::size_t l = 0; l + 1 < levels; ++l) {
      const FlowDifferential& a = *results[p][l];
      const FlowDifferential& b = *results[p][l + 1];
      rep.flow_c0[l] = std::max(rep.flow_c0[l], (a.end.stacked() - b.end.stacked()).norm());
      rep.dflow_c0[l] = std::max(rep.dflow_c0[l], (a.matrix - b.matrix).cwiseAbs().maxCoeff());
    }
  }
  if (rep.probes_used == 0) throw OutOfDomain("flow_convergence_report: every probe left a chart");
  rep.flow = apply_rule(rep.flow_c0, rule);
  rep.dflow = apply_rule(rep.dflow_c0, rule);
  rep.dflow_bound = rep.dflow_c0.empty() ? 0.0 : *std::max_element(rep.dflow_c0.begin(), rep.dflow_c0.end());
  rep.verdict = rep.flow.converging ? (rep.dflow.converging ? "converging" : "flow-only") : "not-converging";
  return rep;
}

double gronwall_bound(double c_bar, double x0_norm, double t) {
  if (c_bar < 0 || x0_norm < 0 || t < 0) throw ConfigError("gronwall_bound: inputs must be nonnegative");
  return x0_norm * std::exp(c_bar * t);
}

Modulus osgood_gamma(const Modulus& mu_r, double c_tilde, double c_bar, double t1) {
  return Modulus::propagated(c_tilde, c_bar, t1, mu_r);
}

double injradius_lower_bound(double c, double l) {
  if (!(c > 0.0) || !(l > 0.0)) throw ConfigError("injradius_lower_bound: C and l must be positive");
  return std::min(std::numbers::pi / c, l / 2.0);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Violated:
      return "violated";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

OsgoodCheck osgood_integral_check(const std::vector<double>& times, const std::vector<double>& values, double a,
                                  const Modulus& mu, double tol) {
  if (times.size() != values.size() || times.empty()) throw Error("osgood_integral_check: bad samples");
  if (a < 0.0) throw ConfigError("osgood_integral_check: a must be nonnegative");
  OsgoodCheck out;
  if (a == 0.0) {
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::abs(v));
    if (!mu.osgood_divergent()) {
      out.verdict = Verdict::Inconclusive;
      out.margin = -sup;
      return out;
    }
    out.margin = -sup;
    out.verdict = sup <= 1e-12 ? Verdict::Holds : Verdict::Violated;
    return out;
  }
  const double t0 = times.front();
  // Integrated in u = log s, where ds / mu(s) = e^u du / mu(e^u) is flat for
  // linear and power moduli.
  const auto inv = [&mu](double u) {
    const double s = std::exp(u);
    return s / mu(s);
  };
  out.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double l = values[i];
    double integral = 0.0;
    if (l != a) {
      const double lo = std::min(a, l), hi = std::max(a, l);
      if (!(mu(lo) > 0.0)) throw QuadratureFailure("osgood_integral_check: modulus vanishes on the range");
      double err = 0.0;
      const double val =
          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inv, std::log(lo), std::log(hi), 20, 1e-13,
                                                                        &err);
      if (!std::isfinite(val) || err > 1e-8 * std::abs(val) + 1e-12) {
        throw QuadratureFailure("osgood_integral_check: quadrature did not converge");
      }
      integral = l > a ? val : -val;
    }
    out.margin = std::min(out.margin, (times[i] - t0) - integral);
  }
  out.verdict = out.margin >= -tol ? Verdict::Holds : Verdict::Violated;
  return out;
}

HolderCheck holder_modulus_check(const Modulus& empirical, double alpha, double c_bound) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("holder_modulus_check: alpha must lie in (0, 1]");
  HolderCheck out;
  const auto& edges = empirical.upper_edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!empirical.populated()[k]) continue;
    const double value = empirical.values()[k];
    const double limit = c_bound * std::pow(edges[k], alpha);
    if (value > limit) out.holds = false;
    if (limit > 0.0) {
      out.worst_ratio = std::max(out.worst_ratio, value / limit);
    } else if (value > 0.0) {
      out.worst_ratio = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

HolderCheck holder_modulus_check(const std::vector<std::pair<double, double>>& gaps, double alpha, double c_bound,
                                 const ModulusBins& bins) {
  return holder_modulus_check(modulus_from_gaps(gaps, bins), alpha, c_bound);
}

GronwallSample gronwall_dominance(const GraphSurface& surface, const TangentVector& v, const JacobiState& x0,
                                  double t, const JacobiOptions& opts) {
  const JacobiPath path = jacobi_path(surface, v, x0, t, opts);
  if (path.exit_reason != ExitReason::Completed) throw OutOfDomain("gronwall_dominance: geodesic left the chart");
  GronwallSample out;
  out.t = t;
  out.x0_norm = x0.stacked().norm();
  for (const PhaseState& p : path.phase) out.c_bar = std::max(out.c_bar, spectral_norm(jacobi_coefficients(surface, p)));
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double bound = gronwall_bound(out.c_bar, out.x0_norm, path.times[i]);
    const double norm = path.jacobi[i].stacked().norm();
    out.sup_ratio = std::max(out.sup_ratio, bound > 0.0 ? norm / bound : (norm > 0.0 ? 1e300 : 0.0));
  }
  out.dominated = out.sup_ratio <= 1.0;
  return out;
}

namespace {

DependenceOptions with_defaults(const GraphSurface& surface, DependenceOptions o) {
  const int m = surface.dim();
  if (o.center.size() == 0) o.center = Vector::Zero(m);
  // Diagonal data, so that the Jacobi state depends on every coordinate of x0.
  const Vector diagonal = Vector::Ones(m) / std::sqrt(static_cast<double>(m));
  if (o.velocity.size() == 0) o.velocity = diagonal;
  if (o.initial.J.size() == 0) o.initial = {Vector::Zero(m), diagonal};
  return o;
}

}  // namespace

PairRun run_parameter_pair(const GraphSurface& surface, const Vector& x0, const Vector& x0_other,
                           const DependenceOptions& options) {
  const DependenceOptions o = with_defaults(surface, options);
  JacobiOptions jo;
  jo.flow.method = StepMethod::FixedRK4;
  jo.flow.fixed_step = o.rk4_step;
  const JacobiPath a = jacobi_path(surface, {x0, o.velocity}, o.initial, o.t1, jo);
  const JacobiPath b = jacobi_path(surface, {x0_other, o.velocity}, o.initial, o.t1, jo);
  if (a.exit_reason != ExitReason::Completed || b.exit_reason != ExitReason::Completed) {
    throw OutOfDomain("parameter pair: geodesic left the chart before t1");
  }
  PairRun run;
  run.times = a.times;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const Matrix ra = jacobi_coefficients(surface, a.phase[i]);
    const Matrix rb = jacobi_coefficients(surface, b.phase[i]);
    run.coeff_gap = std::max(run.coeff_gap, spectral_norm(ra - rb));
    run.c_bar = std::max({run.c_bar, spectral_norm(ra), spectral_norm(rb)});
    run.c_tilde = std::max({run.c_tilde, a.jacobi[i].stacked().norm(), b.jacobi[i].stacked().norm()});
    run.state_gaps.push_back((a.jacobi[i].stacked() - b.jacobi[i].stacked()).norm());
  }
  return run;
}

DependenceSample parameter_dependence(const GraphSurface& surface, const DependenceOptions& options,
                                      std::mt19937_64& rng) {
  const DependenceOptions o = with_defaults(surface, options);
  const int m = surface.dim();
  std::uniform_real_distribution<double> uni(-o.half_width, o.half_width);
  // Draw everything up front so the sample does not depend on the thread count.
  std::vector<Vector> bases, others;
  std::vector<double> deltas;
  for (int p = 0; p < o.pairs; ++p) {
    Vector x0 = o.center;
    for (int i = 0; i < m; ++i) x0[i] += uni(rng);
    const double delta = log_uniform(o.delta_min, o.delta_max, rng);
    bases.push_back(x0);
    others.push_back(x0 + delta * random_unit(m, rng));
    deltas.push_back(delta);
  }
  std::vector<PairRun> runs(bases.size());
  parallel_for(bases.size(), [&](std::size_t p) { runs[p] = run_parameter_pair(surface, bases[p], others[p], o); });
  DependenceSample out;
  out.t1 = o.t1;
  for (std::size_t p = 0; p < runs.size(); ++p) {
    out.pairs.push_back({deltas[p], runs[p].coeff_gap, runs[p].state_gaps.back()});
    out.c_tilde = std::max(out.c_tilde, runs[p].c_tilde);
    out.c_bar = std::max(out.c_bar, runs[p].c_bar);
  }
  return out;
}

OsgoodDominance osgood_dominance(const DependenceSample& sample, const ModulusBins& bins) {
  ModulusBins b = bins;
  if (b.delta_max <= 0.0) {
    for (const ParameterPair& p : sample.pairs) b.delta_max = std::max(b.delta_max, p.delta);
  }
  std::vector<std::pair<double, double>> coeff, state;
  for (const ParameterPair& p : sample.pairs) {
    coeff.emplace_back(p.delta, p.coeff_gap);
    state.emplace_back(p.delta, p.state_gap);
  }
  OsgoodDominance out{modulus_from_gaps(coeff, b), modulus_from_gaps(state, b), Modulus::linear(0.0), 0, 0.0,
                      true, sample};
  out.gamma = osgood_gamma(out.mu_r, sample.c_tilde, sample.c_bar, sample.t1);
  const auto& edges = out.observed.upper_edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!out.observed.populated()[k]) continue;
    ++out.populated;
    const double obs = out.observed.values()[k];
    const double lim = out.gamma(edges[k]);
    if (obs > lim) out.dominated = false;
    out.worst_ratio = std::max(out.worst_ratio, lim > 0.0 ? obs / lim : (obs > 0.0 ? 1e300 : 0.0));
  }
  return out;
}

HolderExperiment holder_experiment(const DependenceSample& sample, double alpha, const ModulusBins& bins) {
  HolderExperiment out;
  out.alpha = alpha;
  out.sample = sample;
  std::vector<std::pair<double, double>> state;
  for (const ParameterPair& p : sample.pairs) {
    out.coeff_holder = std::max(out.coeff_holder, p.coeff_gap / std::pow(p.delta, alpha));
    state.emplace_back(p.delta, p.state_gap);
  }
  const Modulus gamma = osgood_gamma(Modulus::power(out.coeff_holder, alpha), sample.c_tilde, sample.c_bar, sample.t1);
  out.c_bound = gamma.scale() * out.coeff_holder;
  ModulusBins b = bins;
  if (b.delta_max <= 0.0) {
    for (const ParameterPair& p : sample.pairs) b.delta_max = std::max(b.delta_max, p.delta);
  }
  out.check = holder_modulus_check(state, alpha, out.c_bound, b);
  return out;
}

QuotientSample lipschitz_quotient(const GraphSurface& surface, const Probe& probe, const Vector& perturbation,
                                  const FlowOptions& opts) {
  const int m = surface.dim();
  const Vector base = probe.v.stacked();
  const TangentVector w = TangentVector::from_stacked(base + perturbation);
  const Trajectory ta = integrate_geodesic(surface, probe.v, probe.t, opts);
  const Trajectory tb = integrate_geodesic(surface, w, probe.t, opts);
  if (ta.exit_reason != ExitReason::Completed || tb.exit_reason != ExitReason::Completed) {
    throw OutOfDomain("lipschitz_quotient: geodesic left the chart");
  }
  QuotientSample out;
  for (const Trajectory* tr : {&ta, &tb}) {
    for (const PhaseState& s : tr->states) {
      out.c_bar = std::max(out.c_bar, spectral_norm(jacobi_coefficients(surface, s)));
    }
  }
  // Chart differences to (J, K) along the first geodesic.
  const auto to_jk = [&](const PhaseState& at, const Vector& d) {
    Vector r = d;
    r.tail(m) += christoffel_at(surface, at.x).along(at.y) * d.head(m);
    return r;
  };
  const Vector start = to_jk(probe.v, perturbation);
  const Vector end = to_jk(ta.final_state(), tb.final_state().stacked() - ta.final_state().stacked());
  out.quotient = end.norm() / start.norm();
  return out;
}

LipschitzReport lipschitz_quotients(const GraphSurface& surface, const std::vector<Probe>& probes,
                                    const PerturbationOptions& opts, std::mt19937_64& rng) {
  if (probes.empty()) throw ConfigError("lipschitz_quotients: no probes");
  const int n = 2 * surface.dim();
  FlowOptions fo;
  fo.method = StepMethod::FixedRK4;
  fo.fixed_step = opts.rk4_step;
  std::vector<Vector> perturbations;
  for (int p = 0; p < opts.pairs; ++p) {
    const Vector dir = random_unit(n, rng);
    perturbations.push_back(log_uniform(opts.delta_min, opts.delta_max, rng) * dir);
  }
  std::vector<QuotientSample> rows(perturbations.size());
  parallel_for(perturbations.size(), [&](std::size_t p) {
    rows[p] = lipschitz_quotient(surface, probes[p % probes.size()], perturbations[p], fo);
  });
  LipschitzReport rep;
  double t_max = 0.0;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    rep.quotients.push_back(rows[p].quotient);
    rep.max_quotient = std::max(rep.max_quotient, rows[p].quotient);
    rep.c_bar = std::max(rep.c_bar, rows[p].c_bar);
    t_max = std::max(t_max, probes[p % probes.size()].t);
  }
  rep.bound = std::exp(rep.c_bar * t_max);
  rep.bounded = true;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (rows[p].quotient > std::exp(rep.c_bar * probes[p % probes.size()].t)) rep.bounded = false;
  }
  return rep;
}

}  // namespace geoflow
