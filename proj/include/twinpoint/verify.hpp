#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "twinpoint/pencil.hpp"

namespace twinpoint {

struct VerifyOptions {
  std::uint64_t seed = 0;
  /// Mutation check: negate the transported twin sign before comparing.
  bool flip_twin_sign = false;
  /// Coarsest discretization of the Example 2 convergence study (then x2, x4).
  int convergence_base_modes = 16;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Gaussian L and C, W = A^T A + I; exactly symmetric.
Pencil random_pencil(std::mt19937_64& rng, int k);

CriterionResult check_twin_theorem(const VerifyOptions& opt);
CriterionResult check_meridian_formula(const VerifyOptions& opt);
CriterionResult check_orientation_calculus(const VerifyOptions& opt);
CriterionResult check_example2_spectrum(const VerifyOptions& opt);
CriterionResult check_example2_branches(const VerifyOptions& opt);
CriterionResult check_example3_circle(const VerifyOptions& opt);
CriterionResult check_example3_isolated(const VerifyOptions& opt);
CriterionResult check_example1_lines(const VerifyOptions& opt);
CriterionResult check_winding_numbers(const VerifyOptions& opt);
CriterionResult check_air_resistance(const VerifyOptions& opt);
CriterionResult check_numerical_hygiene(const VerifyOptions& opt);

struct Criterion {
  int id;
  const char* name;
  std::function<CriterionResult(const VerifyOptions&)> run;
};

const std::vector<Criterion>& acceptance_criteria();

/// Runs every criterion; a thrown exception counts as a failure with its message.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt);

}  // namespace twinpoint
