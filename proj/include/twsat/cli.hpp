#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twsat/solvers.hpp"

namespace twsat::cli {

/// One solver run, serializable as a JSON object or a CSV row with the
/// column order frozen in csv_header().
struct RunReport {
  std::string instance;
  std::string engine;
  int c = 0;
  double epsilon = 0.0;
  std::string splitter;
  int d = 0;
  std::string verdict;
  int n = 0;
  int m = 0;
  int width = 0;
  int bags = 0;
  SolveStats stats;
  double depth_bound_value = 0.0;
  bool with_timings = false;

  static std::string csv_header(bool with_timings);
  std::string csv_row() const;
  std::string json() const;
};

/// Entry point shared by the binary and the tests. Returns the process
/// exit code: 10 SAT / 20 UNSAT for solve, 0 success, 1 error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twsat::cli
