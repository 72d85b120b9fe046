#include "geoflow/io.hpp"

#include "geoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geoflow {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const Json& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump(e, indent, depth + 1, out);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

Json to_json(const ChartDomain& d) {
  Json j{{"lower", to_json(d.lower())}, {"upper", to_json(d.upper())}};
  if (d.radius()) j["radius"] = *d.radius();
  return j;
}

Json to_json(const TangentVector& v) { return Json{{"x", to_json(v.x)}, {"y", to_json(v.y)}}; }

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<double> optional_number(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j, key);
}

}  // namespace

ChartDomain domain_from_json(const Json& j) {
  const Vector lo = vector_from_json(require(j, "lower"), "domain.lower");
  const Vector hi = vector_from_json(require(j, "upper"), "domain.upper");
  if (lo.size() != hi.size() || !(lo.array() < hi.array()).all()) {
    throw ConfigError("domain: need lower < upper with equal lengths");
  }
  return ChartDomain(lo, hi, optional_number(j, "radius"));
}

bool SurfaceSpec::operator==(const SurfaceSpec& o) const {
  if (kind != o.kind || name != o.name) return false;
  if (kind == "catalog") return alpha == o.alpha && domain == o.domain;
  return lattice.origin == o.lattice.origin && lattice.spacing == o.lattice.spacing &&
         lattice.counts == o.lattice.counts && codim == o.codim && values == o.values && regularity == o.regularity &&
         alpha == o.alpha;
}

Json to_json(const SurfaceSpec& s) {
  Json j{{"kind", s.kind}, {"name", s.name}, {"alpha", s.alpha}};
  if (s.kind == "catalog") {
    if (s.domain) j["domain"] = to_json(*s.domain);
    return j;
  }
  j["regularity"] = s.regularity;
  j["codim"] = s.codim;
  j["origin"] = to_json(s.lattice.origin);
  j["spacing"] = to_json(s.lattice.spacing);
  j["counts"] = s.lattice.counts;
  j["values"] = s.values;
  return j;
}

SurfaceSpec surface_spec_from_json(const Json& j) {
  SurfaceSpec s;
  if (j.is_string()) {
    s.name = j.get<std::string>();
    return s;
  }
  if (!j.is_object()) throw ConfigError("surface: expected a name or an object");
  if (j.contains("kind")) s.kind = string_field(j, "kind");
  if (j.contains("name")) s.name = string_field(j, "name");
  if (j.contains("alpha")) s.alpha = number(j, "alpha");
  if (s.kind == "catalog") {
    if (j.contains("domain")) s.domain = domain_from_json(j.at("domain"));
    return s;
  }
  if (s.kind != "grid") throw ConfigError("surface.kind must be 'catalog' or 'grid'");
  if (j.contains("regularity")) s.regularity = string_field(j, "regularity");
  if (j.contains("codim")) s.codim = static_cast<int>(number(j, "codim"));
  s.lattice.origin = vector_from_json(require(j, "origin"), "surface.origin");
  s.lattice.spacing = vector_from_json(require(j, "spacing"), "surface.spacing");
  const Json& counts = require(j, "counts");
  if (!counts.is_array()) throw ConfigError("surface.counts must be an array");
  for (const Json& c : counts) {
    if (!c.is_number_integer() || c.get<int>() < 5) throw ConfigError("surface.counts must be integers >= 5");
    s.lattice.counts.push_back(c.get<int>());
  }
  const Json& values = require(j, "values");
  if (!values.is_array()) throw ConfigError("surface.values must be an array");
  for (const Json& v : values) {
    if (!v.is_number()) throw ConfigError("surface.values must be numbers");
    s.values.push_back(v.get<double>());
  }
  if (s.lattice.origin.size() != s.lattice.spacing.size() ||
      static_cast<std::size_t>(s.lattice.origin.size()) != s.lattice.counts.size()) {
    throw ConfigError("surface: origin, spacing and counts must have equal length");
  }
  if (s.values.size() != s.lattice.size() * static_cast<std::size_t>(s.codim)) {
    throw ConfigError("surface.values must hold codim values per lattice node");
  }
  return s;
}

GraphSurface make_surface(const SurfaceSpec& s) {
  if (s.kind == "catalog") {
    CatalogParams p;
    p.alpha = s.alpha;
    p.domain = s.domain;
    return make_catalog_surface(s.name, p);
  }
  Regularity reg;
  try {
    reg = Regularity::parse(s.regularity, s.alpha);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return make_grid_surface(s.lattice, s.codim, s.values, reg, s.name);
}

FlowOptions ToleranceSpec::flow_options() const {
  FlowOptions o;
  o.method = method == "rk4" ? StepMethod::FixedRK4 : StepMethod::Adaptive;
  o.rel_tol = rel_tol;
  o.abs_tol = abs_tol;
  o.max_step = max_step;
  o.fixed_step = fixed_step;
  return o;
}

Json to_json(const ToleranceSpec& t) {
  Json j{{"method", t.method}};
  if (t.rel_tol) j["rel_tol"] = *t.rel_tol;
  if (t.abs_tol) j["abs_tol"] = *t.abs_tol;
  if (t.max_step) j["max_step"] = *t.max_step;
  j["fixed_step"] = t.fixed_step;
  return j;
}

ToleranceSpec tolerance_spec_from_json(const Json& j) {
  ToleranceSpec t;
  if (!j.is_object()) throw ConfigError("tolerances must be an object");
  if (j.contains("method")) t.method = string_field(j, "method");
  if (t.method != "adaptive" && t.method != "rk4") throw ConfigError("tolerances.method must be 'adaptive' or 'rk4'");
  t.rel_tol = optional_number(j, "rel_tol");
  t.abs_tol = optional_number(j, "abs_tol");
  t.max_step = optional_number(j, "max_step");
  if (j.contains("fixed_step")) t.fixed_step = number(j, "fixed_step");
  for (const auto& v : {t.rel_tol, t.abs_tol, t.max_step}) {
    if (v && !(*v > 0.0)) throw ConfigError("tolerances must be positive");
  }
  if (!(t.fixed_step > 0.0)) throw ConfigError("tolerances.fixed_step must be positive");
  return t;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return schema == o.schema && command == o.command && surface == o.surface && params == o.params &&
         tolerances == o.tolerances && out == o.out && csv == o.csv && seed == o.seed;
}

Json to_json(const RunConfig& c) {
  return Json{{"schema", c.schema},       {"command", c.command}, {"surface", to_json(c.surface)},
              {"params", c.params},       {"tolerances", to_json(c.tolerances)},
              {"out", c.out},             {"csv", c.csv},         {"seed", c.seed}};
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  if (j.contains("schema")) {
    if (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion) {
      throw ConfigError("unsupported config schema");
    }
  }
  if (j.contains("command")) c.command = string_field(j, "command");
  if (j.contains("surface")) c.surface = surface_spec_from_json(j.at("surface"));
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("params must be an object");
    c.params = j.at("params");
  }
  if (j.contains("tolerances")) c.tolerances = tolerance_spec_from_json(j.at("tolerances"));
  if (j.contains("out")) c.out = string_field(j, "out");
  if (j.contains("csv")) c.csv = string_field(j, "csv");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace geoflow
