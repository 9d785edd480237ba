#pragma once

#include <complex>
#include <vector>

#include "twinpoint/continuation.hpp"
#include "twinpoint/problems.hpp"

namespace twinpoint {

struct WindingConfig {
  int samples = 512;
  /// Bisection depth allowed on a sample interval whose argument step reaches pi/2.
  int max_refinements = 40;
  /// Relative gap: x^2 + x'^2 must exceed eps_gap times its maximum on the grid.
  double eps_gap = 1e-8;
};

struct WindingResult {
  int value = 0;
  double min_gap = 0.0;
  double max_arg_step = 0.0;
  int samples_used = 0;
};

/// Point theta in [0, 2 pi] of the closed curve j(x). `gap_scale` is the
/// reference for the relative gap checks; 0 selects <c,c>_W.
std::complex<double> curve_j(const ProblemSpec& ps, const Vec& c, double theta, double eps_gap = 1e-8,
                             double gap_scale = 0.0);

WindingResult winding_number(const ProblemSpec& ps, const Vec& c, const WindingConfig& cfg = {});

struct BranchWinding {
  std::vector<int> values;
  bool constant = true;
};

/// Winding number at every point of the branch, in point order.
BranchWinding branch_winding(const ProblemSpec& ps, const Branch& branch, const WindingConfig& cfg = {});

}  // namespace twinpoint
