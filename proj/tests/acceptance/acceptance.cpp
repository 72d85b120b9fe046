// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Optional arguments: --seed N, --ignore-time-limits.

#include "geoflow/suites.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  geoflow::SuiteOptions opts;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) {
      opts.seed = std::stoull(argv[++i]);
    } else if (a == "--ignore-time-limits") {
      opts.ignore_time_limits = true;
    } else {
      std::cerr << "usage: acceptance [--seed N] [--ignore-time-limits]\n";
      return 2;
    }
  }
  int failed = 0;
  for (int id : geoflow::criterion_ids()) {
    const geoflow::CriterionResult r = geoflow::run_criterion(id, opts);
    std::cout << geoflow::summary_line(r) << std::endl;
    if (!r.passed) {
      ++failed;
      std::cout << "    " << geoflow::dump_json(r.details) << std::endl;
    }
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
