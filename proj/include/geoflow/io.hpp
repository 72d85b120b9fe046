#pragma once

#include "geoflow/catalog.hpp"
#include "geoflow/flow.hpp"
#include "geoflow/grid.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geoflow {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// %.17g; non-finite values become "nan", "inf", "-inf".
std::string format_double(double v);

// Pretty printer with doubles at %.17g (non-finite as null) and keys in
// insertion order, so equal inputs give byte-identical text.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // array of rows
Json to_json(const ChartDomain& d);
Json to_json(const TangentVector& v);

// These throw ConfigError on malformed input.
Vector vector_from_json(const Json& j, const char* what);
ChartDomain domain_from_json(const Json& j);

// Either a catalog entry (name, alpha, optional domain) or grid samples.
struct SurfaceSpec {
  std::string kind = "catalog";  // "catalog" or "grid"
  std::string name = "flat";
  double alpha = 0.5;
  std::optional<ChartDomain> domain;
  // grid only
  Lattice lattice;
  int codim = 1;
  std::vector<double> values;
  std::string regularity = "C2";

  bool operator==(const SurfaceSpec&) const;
};

Json to_json(const SurfaceSpec& s);
SurfaceSpec surface_spec_from_json(const Json& j);
GraphSurface make_surface(const SurfaceSpec& s);

struct ToleranceSpec {
  std::string method = "adaptive";  // or "rk4"
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::optional<double> max_step;
  double fixed_step = 1e-3;

  bool operator==(const ToleranceSpec&) const = default;
  FlowOptions flow_options() const;
};

Json to_json(const ToleranceSpec& t);
ToleranceSpec tolerance_spec_from_json(const Json& j);

struct RunConfig {
  int schema = kSchemaVersion;
  std::string command;
  SurfaceSpec surface;
  // Command parameters (x0, y0, t, scales, ...), kept as given.
  Json params = Json::object();
  ToleranceSpec tolerances;
  std::string out;  // JSON output path; empty for stdout
  std::string csv;  // CSV output path; empty to skip
  std::uint64_t seed = 20260101;

  bool operator==(const RunConfig&) const;
};

Json to_json(const RunConfig& c);
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace geoflow
