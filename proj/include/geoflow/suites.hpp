#pragma once

#include "geoflow/io.hpp"
#include "geoflow/regularity.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace geoflow {

struct SuiteOptions {
  std::uint64_t seed = 20260101;
  // Replaces the numeric tolerance of the criteria that have one
  // (1, 2, 3, 4, 10, 11).
  std::optional<double> tolerance;
  // Skip the wall-clock limits (for debug builds and sanitizers).
  bool ignore_time_limits = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  // The headline quantity and what it is compared against; `at_most` says
  // which side passes.
  double measured = 0.0;
  double threshold = 0.0;
  bool at_most = true;
  double seconds = 0.0;
  double time_limit = 0.0;
  Json details = Json::object();
};

std::vector<int> criterion_ids();
const std::string& criterion_name(int id);
// Accepts an id ("7") or a name ("osgood-dominance"); throws ConfigError.
int parse_criterion(const std::string& key);

CriterionResult run_criterion(int id, const SuiteOptions& opts = {});
// Timings are left out unless asked for, so equal seeds give equal JSON.
Json to_json(const CriterionResult& r, bool timing = false);

// One line: "[PASS] 3 flow-differential  measured=... <= ...  (1.2 s / 30 s)".
std::string summary_line(const CriterionResult& r);

// Unit g-speed probes with x0 in [x_lo, x_hi] x [y_lo, y_hi] (extra axes in
// [y_lo, y_hi]), direction angle within +-max_angle of the first axis and
// t uniform in [t_lo, t_hi]; only probes whose geodesic stays in the chart
// up to t are kept.
struct ProbeBox {
  double x_lo = -0.2, x_hi = 0.2;
  double y_lo = -0.2, y_hi = 0.2;
  double max_angle = 3.14159265358979323846;
  double t_lo = 0.1, t_hi = 0.3;
  bool random_sign = false;  // negate t with probability 1/2
};

std::vector<Probe> random_probes(const GraphSurface& surface, int count, const ProbeBox& box, std::mt19937_64& rng);

}  // namespace geoflow
