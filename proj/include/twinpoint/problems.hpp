#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twinpoint/linops.hpp"
#include "twinpoint/pencil.hpp"

namespace twinpoint {

/// Function value and derivative at a point t; one entry per component.
struct PointValue {
  Vec value;
  Vec derivative;
};

/// Closed-form branch lambda(s) through the trivial solution at lambda_at_zero.
/// x_sign distinguishes the two lines of the one-dimensional problem (0 if unused).
struct AnalyticBranch {
  double lambda_at_zero = 0.0;
  int x_sign = 0;
  std::function<double(double)> lambda;
};

/// One discretized instance of L x + s N(x) = lambda C x on the W-unit sphere.
struct ProblemSpec {
  Pencil pencil;
  std::function<Vec(const Vec&)> n_eval;
  std::function<Mat(const Vec&)> dn_eval;
  std::function<PointValue(const Vec&, double)> point_eval;
  std::string label;
  std::vector<AnalyticBranch> analytic_branches;
  double t_min = 0.0;
  double t_max = 0.0;
  /// n_eval(-c) == -n_eval(c)
  bool odd = true;
  /// Scalar Dirichlet problem on [0, pi]; the winding map is defined only for these.
  bool scalar_dirichlet = false;
};

struct DiscretizationConfig {
  int modes = 32;
  /// Total quadrature nodes; 0 selects 4 * modes. Rounded up to a multiple of 4.
  int quad_points = 0;

  int effective_quad_points() const;
};

/// Composite 4-point Gauss-Legendre rule on [a, b] with `points` total nodes.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule composite_gauss(double a, double b, int points);

ProblemSpec build_example1(double l, double c, double n_plus1, double n_minus1);
ProblemSpec build_example2(const DiscretizationConfig& cfg);
ProblemSpec build_example3(const DiscretizationConfig& cfg);

using ScalarFn = std::function<double(double)>;

/// x'' + s g(x') + lambda x = 0, x(0) = x(pi) = 0. Defaults to g(v) = v|v|.
ProblemSpec build_air_resistance(const DiscretizationConfig& cfg, ScalarFn g = {}, ScalarFn g_prime = {});

PointValue eval_point(const ProblemSpec& ps, const Vec& c, double t);

/// Sine-Galerkin matrix of x -> 2x' in L2-sine coordinates, closed form.
Mat sine_derivative_projection(int modes);

/// W-unit coefficient vector of sqrt(2/(1+n^4)) sin(nt) in the sine basis.
Vec sine_mode(int modes, int n);

/// Coefficients of the constant function (cos(theta/2), sin(theta/2)) in the
/// trigonometric basis of the periodic system.
Vec example3_circle_state(int modes, double theta);

}  // namespace twinpoint
