#include "geoflow/catalog.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/io.hpp"
#include "geoflow/minimality.hpp"
#include "geoflow/suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace geoflow;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kDomain = 3 };

// Flag values; anything left unset falls back to the config file.
struct Flags {
  std::string config;
  std::string surface;
  std::optional<double> alpha;
  std::vector<double> x0, y0;
  std::optional<double> t;
  std::optional<double> tol;
  std::string method;
  std::string out, csv;
  std::optional<std::uint64_t> seed;
  bool fd_check = false;
  std::vector<double> scales;
  std::optional<int> probes;
  std::optional<double> region;
  std::optional<int> resolution;
  std::vector<std::string> suites;
  std::optional<double> tolerance;
  bool timing = false;
};

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  c.command = command;
  if (!f.surface.empty()) {
    c.surface = SurfaceSpec{};
    c.surface.name = f.surface;
  }
  if (f.alpha) c.surface.alpha = *f.alpha;
  if (!f.x0.empty()) c.params["x0"] = f.x0;
  if (!f.y0.empty()) c.params["y0"] = f.y0;
  if (f.t) c.params["t"] = *f.t;
  if (f.tol) c.tolerances.rel_tol = *f.tol;
  if (!f.method.empty()) c.tolerances.method = f.method;
  if (!f.out.empty()) c.out = f.out;
  if (!f.csv.empty()) c.csv = f.csv;
  if (f.seed) c.seed = *f.seed;
  if (f.fd_check) c.params["fd_check"] = true;
  if (!f.scales.empty()) c.params["scales"] = f.scales;
  if (f.probes) c.params["probes"] = *f.probes;
  if (f.region) c.params["region"] = *f.region;
  if (f.resolution) c.params["resolution"] = *f.resolution;
  if (!f.suites.empty()) c.params["suites"] = f.suites;
  if (f.tolerance) c.params["tolerance"] = *f.tolerance;
  if (c.tolerances.method != "adaptive" && c.tolerances.method != "rk4") {
    throw ConfigError("--method must be 'adaptive' or 'rk4'");
  }
  return c;
}

Vector param_vector(const RunConfig& c, const char* key, int dim, std::optional<Vector> fallback = std::nullopt) {
  if (!c.params.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(std::string("missing parameter '") + key + "'");
  }
  Vector v = vector_from_json(c.params.at(key), key);
  if (v.size() != dim) throw ConfigError(std::string("parameter '") + key + "' has the wrong dimension");
  return v;
}

double param_number(const RunConfig& c, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!c.params.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(std::string("missing parameter '") + key + "'");
  }
  if (!c.params.at(key).is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return c.params.at(key).get<double>();
}

void emit(const RunConfig& c, const Json& j) {
  const std::string text = dump_json(j);
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ConfigError("cannot write " + c.out);
  f << text;
}

Json header(const RunConfig& c) {
  return Json{{"schema", kSchemaVersion}, {"command", c.command}, {"seed", c.seed}, {"config", to_json(c)}};
}

int cmd_surface_list() {
  Json list = Json::array();
  for (const std::string& name : catalog_names()) {
    const CatalogEntry e = catalog_entry(name);
    list.push_back({{"name", e.name}, {"regularity", e.regularity.tag()}, {"formula", e.formula}});
  }
  std::cout << dump_json(Json{{"schema", kSchemaVersion}, {"surfaces", list}});
  return kOk;
}

int cmd_surface_info(const std::string& name, double alpha) {
  CatalogParams p;
  p.alpha = alpha;
  const CatalogEntry e = catalog_entry(name, p);
  const GraphSurface s = make_catalog_surface(name, p);
  const SurfaceBounds& b = s.bounds();
  Json j{{"schema", kSchemaVersion},
         {"name", e.name},
         {"formula", e.formula},
         {"regularity", e.regularity.tag()},
         {"domain", to_json(e.domain)},
         {"bounds",
          {{"grad_sup", b.grad_sup},
           {"hess_sup", b.hess_sup},
           {"grad", b.grad},
           {"hess", b.hess},
           {"samples_per_axis", b.samples_per_axis}}},
         {"facts", e.facts}};
  std::cout << dump_json(j);
  return kOk;
}

int cmd_geodesic(const RunConfig& c) {
  const GraphSurface s = make_surface(c.surface);
  const int m = s.dim();
  const TangentVector v{param_vector(c, "x0", m), param_vector(c, "y0", m)};
  const double t = param_number(c, "t");
  if (t < 0) throw ConfigError("t must be nonnegative");
  const Trajectory tr = integrate_geodesic(s, v, t, c.tolerances.flow_options());
  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    if (!f) throw ConfigError("cannot write " + c.csv);
    write_trajectory_csv(f, s, tr);
  }
  Json j = header(c);
  j["surface"] = s.name();
  j["initial"] = to_json(v);
  j["t_end"] = t;
  j["t_final"] = tr.t_final();
  j["final_state"] = to_json(tr.final_state());
  j["exit_reason"] = exit_reason_name(tr.exit_reason);
  j["speed"] = tr.speed;
  j["speed_drift"] = tr.speed_drift(s);
  j["samples"] = tr.times.size();
  emit(c, j);
  return kOk;
}

int cmd_jacobian(const RunConfig& c) {
  const GraphSurface s = make_surface(c.surface);
  const int m = s.dim();
  const TangentVector v{param_vector(c, "x0", m), param_vector(c, "y0", m)};
  const double t = param_number(c, "t");
  JacobiOptions jo;
  jo.flow = c.tolerances.flow_options();
  const FlowDifferential fd = flow_differential(s, t, v, jo);
  Json j = header(c);
  j["surface"] = s.name();
  j["initial"] = to_json(v);
  j["t"] = t;
  j["final_state"] = to_json(fd.end);
  j["matrix"] = to_json(fd.matrix);
  if (c.params.value("fd_check", false)) {
    const Matrix f = fd_flow_differential(s, t, v);
    j["fd_matrix"] = to_json(f);
    j["max_abs_diff"] = (f - fd.matrix).cwiseAbs().maxCoeff();
  }
  emit(c, j);
  return kOk;
}

int cmd_smooth_converge(const RunConfig& c) {
  const GraphSurface s = make_surface(c.surface);
  if (s.regularity().at_least(RegularityClass::C3)) {
    std::cerr << "warning: " << s.name() << " is already C3 or better; smoothing is not needed\n";
  }
  std::vector<double> scales{0.1, 0.05, 0.025, 0.0125};
  if (c.params.contains("scales")) {
    scales.clear();
    const Json& a = c.params.at("scales");
    if (!a.is_array()) throw ConfigError("scales must be an array");
    for (const Json& e : a) {
      if (!e.is_number()) throw ConfigError("scales must be numbers");
      scales.push_back(e.get<double>());
    }
  }
  const int probes = static_cast<int>(param_number(c, "probes", 20));
  if (probes < 1) throw ConfigError("probes must be positive");
  const double region = param_number(c, "region", 0.5);
  SequenceOptions so;
  so.mollify.region = ChartDomain::cube(s.dim(), region);
  const SmoothingSequence seq = approximation_sequence(s, scales, so);
  std::mt19937_64 rng(c.seed);
  const std::vector<Probe> pr = random_probes(s, probes, ProbeBox{}, rng);
  JacobiOptions jo;
  jo.flow = c.tolerances.flow_options();
  const ConvergenceReport rep = flow_convergence_report(seq, pr, ConvergenceRule{}, jo);

  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    if (!f) throw ConfigError("cannot write " + c.csv);
    f << "level,scale,metric_c1,pi_c0,flow_c0,dflow_c0\n";
    for (std::size_t l = 0; l < scales.size(); ++l) {
      f << l << ',' << format_double(scales[l]) << ',' << format_double(rep.metric_c1[l]) << ','
        << format_double(rep.pi_c0[l]) << ',';
      // Level-to-level distances belong to the finer level of each pair.
      f << (l == 0 ? "" : format_double(rep.flow_c0[l - 1])) << ','
        << (l == 0 ? "" : format_double(rep.dflow_c0[l - 1])) << '\n';
    }
  }
  Json j = header(c);
  j["surface"] = s.name();
  j["scales"] = rep.scales;
  j["metric_c1"] = rep.metric_c1;
  j["pi_c0"] = rep.pi_c0;
  j["flow_c0"] = rep.flow_c0;
  j["dflow_c0"] = rep.dflow_c0;
  j["pi_bound"] = rep.pi_bound;
  j["dflow_bound"] = rep.dflow_bound;
  j["flow_factor"] = rep.flow.mean_factor;
  j["dflow_factor"] = rep.dflow.mean_factor;
  j["probes_used"] = rep.probes_used;
  j["pruned"] = rep.pruned;
  j["verdict"] = rep.verdict;
  emit(c, j);
  return kOk;
}

int cmd_minimality(const RunConfig& c) {
  const GraphSurface s = make_surface(c.surface);
  const int m = s.dim();
  const Vector x0 = param_vector(c, "x0", m);
  Vector y0 = param_vector(c, "y0", m);
  const double length = param_number(c, "t");
  const int resolution = static_cast<int>(param_number(c, "resolution", 128));
  if (!(length > 0.0)) throw ConfigError("t (geodesic length) must be positive");
  y0 /= g_norm(s, x0, y0);
  const Trajectory tr = integrate_geodesic(s, {x0, y0}, length, c.tolerances.flow_options());
  if (tr.exit_reason != ExitReason::Completed) throw OutOfDomain("geodesic leaves the chart before the given length");
  const MeshGeodesicOracle oracle = build_mesh_oracle(s, resolution);
  const MinimalityReport r = minimality_report(s, tr, oracle);
  Json j = header(c);
  j["surface"] = s.name();
  j["resolution"] = resolution;
  j["geodesic_length"] = r.geodesic_length;
  j["mesh_length"] = r.mesh_length;
  j["error_budget"] = r.error_budget;
  j["margin"] = r.margin;
  j["hops"] = r.hops;
  j["verdict"] = r.holds() ? "minimal" : "not-certified";
  emit(c, j);
  return r.holds() ? kOk : kFailed;
}

int cmd_report(const RunConfig& c, bool timing) {
  std::vector<int> ids;
  if (!c.params.contains("suites")) throw ConfigError("no suites selected");
  const Json& sel = c.params.at("suites");
  if (!sel.is_array()) throw ConfigError("suites must be an array");
  for (const Json& e : sel) {
    const std::string key = e.is_string() ? e.get<std::string>() : e.dump();
    if (key == "all") {
      ids = criterion_ids();
      break;
    }
    ids.push_back(parse_criterion(key));
  }
  if (ids.empty()) throw ConfigError("no suites selected");
  SuiteOptions so;
  so.seed = c.seed;
  if (c.params.contains("tolerance")) so.tolerance = param_number(c, "tolerance");
  bool all = true;
  Json results = Json::array();
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, so);
    std::cerr << summary_line(r) << '\n';
    all = all && r.passed;
    results.push_back(to_json(r, timing));
  }
  Json j = header(c);
  j["results"] = results;
  j["passed"] = all;
  emit(c, j);
  return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic flows on embedded graph surfaces"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run config; flags override it");
    sub->add_option("--surface", f.surface, "catalog surface name");
    sub->add_option("--alpha", f.alpha, "Hoelder exponent for c2alpha");
    sub->add_option("--out", f.out, "JSON output path (default stdout)");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--tol", f.tol, "relative integrator tolerance");
    sub->add_option("--method", f.method, "adaptive or rk4");
  };
  const auto initial = [&f](CLI::App* sub) {
    sub->add_option("--x0", f.x0, "base point")->delimiter(',');
    sub->add_option("--y0", f.y0, "chart velocity")->delimiter(',');
    sub->add_option("--t", f.t, "time");
  };

  CLI::App* surface = app.add_subcommand("surface", "list or describe catalog surfaces");
  surface->require_subcommand(1);
  surface->add_subcommand("list", "list catalog surfaces");
  CLI::App* info = surface->add_subcommand("info", "describe one surface");
  std::string info_name;
  double info_alpha = 0.5;
  info->add_option("name", info_name)->required();
  info->add_option("--alpha", info_alpha);

  CLI::App* geodesic = app.add_subcommand("geodesic", "integrate one geodesic");
  common(geodesic);
  initial(geodesic);
  geodesic->add_option("--csv", f.csv, "trajectory CSV path");

  CLI::App* jacobian = app.add_subcommand("jacobian", "flow differential by Jacobi propagation");
  common(jacobian);
  initial(jacobian);
  jacobian->add_flag("--fd-check", f.fd_check, "also compute the finite-difference matrix");

  CLI::App* smooth = app.add_subcommand("smooth-converge", "convergence of flows of mollified surfaces");
  common(smooth);
  smooth->add_option("--scales", f.scales, "mollifier radii, decreasing")->delimiter(',');
  smooth->add_option("--probes", f.probes, "number of random probes");
  smooth->add_option("--region", f.region, "half width of the smoothed region");
  smooth->add_option("--csv", f.csv, "delta-vs-level CSV path");

  CLI::App* minimal = app.add_subcommand("minimality", "mesh certificate that a geodesic minimizes length");
  common(minimal);
  initial(minimal);
  minimal->add_option("--resolution", f.resolution, "mesh cells per axis");

  CLI::App* report = app.add_subcommand("report", "run acceptance suites");
  common(report);
  report->add_option("--suite", f.suites, "criterion ids or names, or 'all'")->delimiter(',');
  report->add_option("--tolerance", f.tolerance, "override the numeric tolerances");
  report->add_flag("--timing", f.timing, "include wall-clock seconds in the JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (surface->parsed()) {
      if (info->parsed()) return cmd_surface_info(info_name, info_alpha);
      return cmd_surface_list();
    }
    if (geodesic->parsed()) return cmd_geodesic(resolve("geodesic", f));
    if (jacobian->parsed()) return cmd_jacobian(resolve("jacobian", f));
    if (smooth->parsed()) return cmd_smooth_converge(resolve("smooth-converge", f));
    if (minimal->parsed()) return cmd_minimality(resolve("minimality", f));
    if (report->parsed()) return cmd_report(resolve("report", f), f.timing);
  } catch (const UnknownSurface& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const OutOfChart& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const OutOfDomain& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const DomainTooSmall& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kConfig;
}
