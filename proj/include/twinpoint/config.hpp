#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twinpoint/continuation.hpp"
#include "twinpoint/problems.hpp"

namespace twinpoint {

/// Everything a CLI run needs. Parsed from flat `key = value` text.
struct RunConfig {
  std::string problem = "example2";
  DiscretizationConfig disc;
  /// Example 1 parameters.
  double l = 2.0;
  double c = 1.0;
  double n_plus = 1.0;
  double n_minus = 0.5;
  /// Air resistance nonlinearity: vabsv | cubic | linear.
  std::string g = "vabsv";
  /// Pencil text file for problem = pencil.
  std::string pencil_file;

  double lo = 0.5;
  double hi = 10.0;
  int grid_n = 1000;
  LinopsConfig lin;

  ContinuationConfig cont;
  /// Trace the twin seed -x* as well as x*.
  bool twins = true;
  /// Restrict seeds to these eigenvalues (empty: all in the window).
  std::vector<double> seed_lambdas;

  int winding_samples = 512;
  std::uint64_t seed = 0;
  std::string out = "out";

  /// none | twin_sign_flip
  std::string fault_injection = "none";
  int convergence_base_modes = 16;
};

/// Throws ConfigError on syntax errors, unknown keys or out-of-range values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Range checks shared by the parser and command-line overrides.
void validate(const RunConfig& cfg);

ProblemSpec build_problem(const RunConfig& cfg);

}  // namespace twinpoint
