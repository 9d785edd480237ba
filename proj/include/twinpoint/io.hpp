#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twinpoint/continuation.hpp"
#include "twinpoint/linops.hpp"
#include "twinpoint/pencil.hpp"

namespace twinpoint {

/// "rows cols" on the first line, then one whitespace-separated row per line.
Mat read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Mat& a);

/// L, C and W in matrix format separated by blank lines.
Pencil read_pencil(std::istream& in);
void write_pencil(std::ostream& out, const Pencil& p);

/// %.17g
std::string format_double(double x);

/// step,s,lambda,wnorm,winding,term. The first row carries the backward
/// termination and the last row the forward one.
void write_branch_csv(std::ostream& out, const ProblemSpec& ps, const Branch& branch,
                      const std::vector<int>* winding = nullptr);

struct CsvRow {
  int step = 0;
  double s = 0.0;
  double lambda = 0.0;
  double wnorm = 0.0;
  std::optional<int> winding;
  std::string term;
};

std::vector<CsvRow> read_branch_csv(std::istream& in);

struct PlotBranch {
  std::vector<std::pair<double, double>> path;     ///< (s, lambda)
  std::vector<std::pair<double, double>> markers;  ///< trivial solutions
};

/// (s, lambda)-plane plot: one polyline per branch, one circle per marker.
void write_svg(std::ostream& out, const std::vector<PlotBranch>& branches);

}  // namespace twinpoint
