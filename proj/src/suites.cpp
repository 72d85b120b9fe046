#include "geoflow/suites.hpp"

#include "geoflow/catalog.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/minimality.hpp"
#include "geoflow/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

namespace geoflow {

namespace {

struct CriterionSpec {
  int id;
  std::string name;
  double time_limit;
  std::optional<double> tolerance;  // default numeric tolerance, when overridable
};

const std::vector<CriterionSpec>& specs() {
  static const std::vector<CriterionSpec> s{
      {1, "sphere-exp", 1.0, 1e-8},
      {2, "sphere-jacobi", 1.0, 1e-7},
      {3, "flow-differential", 30.0, 1e-5},
      {4, "gauss-consistency", 5.0, 1e-5},
      {5, "k2-convergence", 120.0, std::nullopt},
      {6, "lipschitz-flow", 120.0, std::nullopt},
      {7, "osgood-dominance", 60.0, std::nullopt},
      {8, "holder-branch", 60.0, std::nullopt},
      {9, "minimality", 120.0, std::nullopt},
      {10, "non-branching", 60.0, 1e-7},
      {11, "mixed-partials", 10.0, 1e-5},
  };
  return s;
}

const CriterionSpec& spec(int id) {
  for (const CriterionSpec& s : specs()) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown criterion " + std::to_string(id));
}

std::mt19937_64 criterion_rng(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

Vector unit_g(const GraphSurface& s, const Vector& x, Vector y) { return y / g_norm(s, x, y); }

const std::vector<double> kScales{0.1, 0.05, 0.025, 0.0125};

SequenceOptions sequence_options() {
  SequenceOptions so;
  so.mollify.region = ChartDomain::cube(2, 0.5);
  return so;
}

Json sequence_json(const ConvergenceReport& rep) {
  return Json{{"scales", rep.scales},   {"metric_c1", rep.metric_c1}, {"pi_c0", rep.pi_c0},
              {"flow_c0", rep.flow_c0}, {"dflow_c0", rep.dflow_c0},   {"flow_factor", rep.flow.mean_factor},
              {"dflow_factor", rep.dflow.mean_factor}, {"probes_used", rep.probes_used},
              {"verdict", rep.verdict}};
}

// Each body fills measured / threshold / at_most / passed / details.
void sphere_exp(CriterionResult& r, double tol, std::mt19937_64&) {
  const GraphSurface s = make_catalog_surface("hemisphere");
  const Vector end = exp_map(s, {Vector::Zero(2), Vector::Unit(2, 0) * 0.5});
  Vector expected(2);
  expected << std::sin(0.5), 0.0;
  r.measured = (end - expected).cwiseAbs().maxCoeff();
  r.threshold = tol;
  r.passed = r.measured <= tol;
  r.details = {{"endpoint", to_json(end)}, {"expected", to_json(expected)}};
}

void sphere_jacobi(CriterionResult& r, double tol, std::mt19937_64&) {
  const GraphSurface s = make_catalog_surface("hemisphere");
  const TangentVector v{Vector::Zero(2), Vector::Unit(2, 0)};
  const JacobiState j0{Vector::Zero(2), Vector::Unit(2, 1)};
  Json rows = Json::array();
  double worst = 0.0;
  for (int k = 1; k <= 5; ++k) {
    const double t = 0.1 * k;
    const JacobiState j = propagate_jacobi(s, v, j0, t);
    const Vector x = geodesic_flow(s, t, v).x;
    const double norm = g_norm(s, x, j.J);
    worst = std::max(worst, std::abs(norm - std::sin(t)));
    rows.push_back({{"t", t}, {"norm", norm}, {"sin", std::sin(t)}});
  }
  r.measured = worst;
  r.threshold = tol;
  r.passed = worst <= tol;
  r.details = {{"samples", rows}};
}

void flow_differential_check(CriterionResult& r, double tol, std::mt19937_64& rng) {
  ProbeBox box;
  box.t_lo = 0.1;
  box.t_hi = 0.5;
  box.random_sign = true;
  Json per = Json::object();
  double worst = 0.0;
  for (const char* name : {"flat", "hemisphere", "trough", "c21_cubic"}) {
    const GraphSurface s = make_catalog_surface(name);
    const std::vector<Probe> probes = random_probes(s, 20, box, rng);
    std::vector<double> diff(probes.size());
    parallel_for(probes.size(), [&](std::size_t p) {
      const Matrix a = flow_differential(s, probes[p].t, probes[p].v).matrix;
      const Matrix b = fd_flow_differential(s, probes[p].t, probes[p].v);
      diff[p] = (a - b).cwiseAbs().maxCoeff();
    });
    const double w = *std::max_element(diff.begin(), diff.end());
    per[name] = w;
    worst = std::max(worst, w);
  }
  r.measured = worst;
  r.threshold = tol;
  r.passed = worst <= tol;
  r.details = {{"max_abs_diff", per}};
}

void gauss_consistency(CriterionResult& r, double tol, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  Json per = Json::object();
  double worst = 0.0;
  for (const char* name : {"hemisphere", "trough"}) {
    const GraphSurface s = make_catalog_surface(name);
    double w = 0.0;
    for (int k = 0; k < 50;) {
      Vector x(2);
      x << uni(rng), uni(rng);
      if (!s.contains(x)) continue;
      const double a = angle(rng);
      Vector v(2);
      v << std::cos(a), std::sin(a);
      const Matrix pi_route = curvature_operator(s, x, v);
      const Matrix gamma_route = curvature_operator_from_christoffel(s, x, v);
      // Relative to the operator size, with unit floor for flat cases.
      const double scale = std::max(1.0, gamma_route.cwiseAbs().maxCoeff());
      w = std::max(w, (pi_route - gamma_route).cwiseAbs().maxCoeff() / scale);
      ++k;
    }
    per[name] = w;
    worst = std::max(worst, w);
  }
  r.measured = worst;
  r.threshold = tol;
  r.passed = worst <= tol;
  r.details = {{"relative_error", per}};
}

void k2_convergence(CriterionResult& r, double, std::mt19937_64& rng) {
  const GraphSurface s = make_catalog_surface("c21_cubic");
  const SmoothingSequence seq = approximation_sequence(s, kScales, sequence_options());
  const std::vector<Probe> probes = random_probes(s, 20, ProbeBox{}, rng);
  const ConvergenceReport rep = flow_convergence_report(seq, probes);
  r.measured = rep.dflow.mean_factor;
  r.threshold = ConvergenceRule{}.min_factor;
  r.at_most = false;
  r.passed = rep.dflow.converging;
  r.details = sequence_json(rep);
}

void lipschitz_flow(CriterionResult& r, double, std::mt19937_64& rng) {
  const GraphSurface s = make_catalog_surface("vee");
  const SmoothingSequence seq = approximation_sequence(s, kScales, sequence_options());
  ProbeBox box;
  box.x_lo = -0.15;
  box.x_hi = -0.05;
  box.max_angle = 3.14159265358979323846 / 4.0;
  box.t_lo = 0.25;
  box.t_hi = 0.35;
  const std::vector<Probe> probes = random_probes(s, 20, box, rng);
  const ConvergenceReport rep = flow_convergence_report(seq, probes);
  const LipschitzReport lip = lipschitz_quotients(s, probes, PerturbationOptions{}, rng);
  const double c_bar_limit = 2.2;
  r.measured = lip.c_bar;
  r.threshold = c_bar_limit;
  r.passed = rep.flow.converging && lip.bounded && lip.c_bar <= c_bar_limit;
  Json d = sequence_json(rep);
  d["max_quotient"] = lip.max_quotient;
  d["c_bar"] = lip.c_bar;
  d["gronwall_bound"] = lip.bound;
  d["quotients_bounded"] = lip.bounded;
  d["pairs"] = lip.quotients.size();
  r.details = d;
}

Json modulus_json(const Modulus& m) {
  Json bins = Json::array();
  for (std::size_t k = 0; k < m.upper_edges().size(); ++k) {
    if (m.populated()[k]) bins.push_back({m.upper_edges()[k], m.values()[k]});
  }
  return bins;
}

void osgood(CriterionResult& r, double, std::mt19937_64& rng) {
  const GraphSurface s = make_catalog_surface("c21_cubic");
  const DependenceSample sample = parameter_dependence(s, DependenceOptions{}, rng);
  const OsgoodDominance od = osgood_dominance(sample);
  r.measured = od.worst_ratio;
  r.threshold = 1.0;
  r.passed = od.dominated && od.populated > 0;
  r.details = {{"c_tilde", sample.c_tilde},       {"c_bar", sample.c_bar},
               {"gamma_scale", od.gamma.scale()}, {"populated_bins", od.populated},
               {"observed", modulus_json(od.observed)}};
}

void holder(CriterionResult& r, double, std::mt19937_64& rng) {
  const GraphSurface s = make_catalog_surface("c2alpha");
  const double alpha = s.regularity().alpha;
  const DependenceSample sample = parameter_dependence(s, DependenceOptions{}, rng);
  const HolderExperiment he = holder_experiment(sample, alpha);
  r.measured = he.check.worst_ratio;
  r.threshold = 1.0;
  r.passed = he.check.holds;
  r.details = {{"alpha", alpha},         {"coeff_holder", he.coeff_holder}, {"c_bound", he.c_bound},
               {"c_tilde", sample.c_tilde}, {"c_bar", sample.c_bar}};
}

void minimality(CriterionResult& r, double, std::mt19937_64& rng) {
  Json per = Json::object();
  double worst = std::numeric_limits<double>::infinity();
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    const MeshGeodesicOracle oracle = build_mesh_oracle(s, 128);
    const std::vector<Trajectory> geos = random_short_geodesics(s, 20, rng);
    std::vector<double> margins(geos.size());
    parallel_for(geos.size(), [&](std::size_t k) { margins[k] = minimality_margin(s, geos[k], oracle); });
    const double w = *std::min_element(margins.begin(), margins.end());
    per[name] = w;
    worst = std::min(worst, w);
  }
  r.measured = worst;
  r.threshold = 0.0;
  r.at_most = false;
  r.passed = worst >= 0.0;
  r.details = {{"min_margin", per}};
}

void non_branching(CriterionResult& r, double tol, std::mt19937_64& rng) {
  const GraphSurface vee = make_catalog_surface("vee");
  const std::vector<double> steps{1e-3, 5e-4, 2.5e-4};
  std::normal_distribution<double> normal;
  Json runs = Json::array();
  bool branching_ok = true;
  const std::vector<std::pair<Vector, Vector>> starts{
      {(Vector(2) << 0.0, -0.1).finished(), (Vector(2) << 0.0, 1.0).finished()},     // along the crease
      {(Vector(2) << -0.1, 0.0).finished(), (Vector(2) << 1.0, 0.0).finished()},     // across it
      {(Vector(2) << -0.1, -0.05).finished(), (Vector(2) << 1.0, 0.5).finished()}};  // oblique
  for (const auto& [x, y] : starts) {
    std::vector<Vector> perturbations;
    for (int k = 0; k < 20; ++k) {
      Vector d(4);
      for (int i = 0; i < 4; ++i) d[i] = normal(rng);
      perturbations.push_back(1e-4 * d / d.norm());
    }
    const BranchingReport br = branching_check(vee, {x, unit_g(vee, x, y)}, 0.3, steps, perturbations);
    branching_ok = branching_ok && br.spread_shrinks && br.quotients_bounded;
    runs.push_back({{"x0", to_json(x)},
                    {"spreads", br.spreads},
                    {"spread_shrinks", br.spread_shrinks},
                    {"max_quotient", *std::max_element(br.quotients.begin(), br.quotients.end())},
                    {"bound", br.bound}});
  }

  ProbeBox box;
  std::uniform_real_distribution<double> uni(0.05, 0.25);
  // The residual measures integrator error, so use the smooth-class tolerances.
  FlowOptions tight;
  tight.rel_tol = 1e-10;
  tight.abs_tol = 1e-12;
  Json per = Json::object();
  double worst = 0.0;
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    if (!s.regularity().at_least(RegularityClass::C2)) continue;
    double w = 0.0;
    for (const Probe& p : random_probes(s, 10, box, rng)) {
      const double s1 = uni(rng);
      w = std::max(w, flow_property_residual(s, s1, p.t, p.v, tight));
    }
    per[name] = w;
    worst = std::max(worst, w);
  }
  r.measured = worst;
  r.threshold = tol;
  r.passed = branching_ok && worst <= tol;
  r.details = {{"vee_runs", runs}, {"composition_residual", per}};
}

void mixed_partials(CriterionResult& r, double tol, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Json per = Json::object();
  double worst = 0.0;
  for (const std::string& name : catalog_names()) {
    const GraphSurface s = make_catalog_surface(name);
    if (!s.regularity().at_least(RegularityClass::C3)) continue;
    double w = 0.0;
    for (const Probe& p : random_probes(s, 5, ProbeBox{}, rng)) {
      TangentVector v = p.v;
      v.y *= 0.4;
      Vector dir(4);
      for (int i = 0; i < 4; ++i) dir[i] = normal(rng);
      w = std::max(w, mixed_partials_residual(s, v, dir / dir.norm(), 1e-4));
    }
    per[name] = w;
    worst = std::max(worst, w);
  }
  r.measured = worst;
  r.threshold = tol;
  r.passed = worst <= tol;
  r.details = {{"residual", per}};
}

using Body = std::function<void(CriterionResult&, double, std::mt19937_64&)>;

const std::map<int, Body>& bodies() {
  static const std::map<int, Body> b{
      {1, sphere_exp},   {2, sphere_jacobi},  {3, flow_differential_check}, {4, gauss_consistency},
      {5, k2_convergence}, {6, lipschitz_flow}, {7, osgood},                  {8, holder},
      {9, minimality},   {10, non_branching}, {11, mixed_partials}};
  return b;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const CriterionSpec& s : specs()) ids.push_back(s.id);
  return ids;
}

const std::string& criterion_name(int id) { return spec(id).name; }

int parse_criterion(const std::string& key) {
  for (const CriterionSpec& s : specs()) {
    if (key == s.name || key == std::to_string(s.id)) return s.id;
  }
  throw ConfigError("unknown criterion '" + key + "'");
}

std::vector<Probe> random_probes(const GraphSurface& surface, int count, const ProbeBox& box, std::mt19937_64& rng) {
  const int m = surface.dim();
  std::uniform_real_distribution<double> ux(box.x_lo, box.x_hi), uy(box.y_lo, box.y_hi);
  std::uniform_real_distribution<double> ua(-box.max_angle, box.max_angle), ut(box.t_lo, box.t_hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::vector<Probe> out;
  for (int attempt = 0; attempt < 1000 * count && static_cast<int>(out.size()) < count; ++attempt) {
    Vector x(m);
    x[0] = ux(rng);
    for (int i = 1; i < m; ++i) x[i] = uy(rng);
    const double a = ua(rng);
    Vector y = Vector::Zero(m);
    y[0] = std::cos(a);
    if (m > 1) y[1] = std::sin(a);
    // Extra axes get a random tilt.
    for (int i = 2; i < m; ++i) y[i] = 0.3 * normal(rng);
    double t = ut(rng);
    if (box.random_sign && coin(rng) < 0.5) t = -t;
    if (!surface.contains(x)) continue;
    y = unit_g(surface, x, y);
    const Trajectory tr = integrate_geodesic(surface, {x, t < 0 ? Vector(-y) : y}, std::abs(t));
    if (tr.exit_reason == ExitReason::Completed) out.push_back({t, {x, y}});
  }
  if (static_cast<int>(out.size()) < count) throw OutOfDomain("random_probes: could not place probes in the chart");
  return out;
}

CriterionResult run_criterion(int id, const SuiteOptions& opts) {
  const CriterionSpec& s = spec(id);
  CriterionResult r;
  r.id = id;
  r.name = s.name;
  r.time_limit = s.time_limit;
  std::mt19937_64 rng = criterion_rng(opts.seed, id);
  const double tol = opts.tolerance && s.tolerance ? *opts.tolerance : s.tolerance.value_or(0.0);
  const auto start = std::chrono::steady_clock::now();
  try {
    bodies().at(id)(r, tol, rng);
  } catch (const Error& e) {
    r.passed = false;
    r.details["error"] = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!opts.ignore_time_limits && r.seconds > r.time_limit) {
    r.passed = false;
    r.details["time_limit_exceeded"] = true;
  }
  return r;
}

Json to_json(const CriterionResult& r, bool timing) {
  Json j{{"id", r.id},
         {"name", r.name},
         {"passed", r.passed},
         {"measured", r.measured},
         {"threshold", r.threshold},
         {"comparison", r.at_most ? "<=" : ">="}};
  if (timing) j["seconds"] = r.seconds;
  j["time_limit"] = r.time_limit;
  j["details"] = r.details;
  return j;
}

std::string summary_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-18s measured=%.3e %s %.3e  (%.2f s / %.0f s)", r.passed ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.measured, r.at_most ? "<=" : ">=", r.threshold, r.seconds, r.time_limit);
  return buf;
}

}  // namespace geoflow
