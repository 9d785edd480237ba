#include "twinpoint/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "twinpoint/errors.hpp"

namespace twinpoint {

namespace {

constexpr double kPi = std::numbers::pi;

PointValue sine_point(const Vec& c, double t) {
  PointValue out{Vec::Zero(1), Vec::Zero(1)};
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    out.value(0) += c(i) * std::sin(n * t);
    out.derivative(0) += c(i) * n * std::cos(n * t);
  }
  return out;
}

Mat sine_gram(int modes) {
  Vec w(modes);
  for (int n = 1; n <= modes; ++n) {
    const double nd = n;
    w(n - 1) = 0.5 * (1.0 + nd * nd * nd * nd);
  }
  return w.asDiagonal();
}

Pencil sine_pencil(int modes) {
  Vec l(modes);
  for (int n = 1; n <= modes; ++n) l(n - 1) = -static_cast<double>(n) * n;
  return Pencil(Mat(l.asDiagonal()), -Mat::Identity(modes, modes), GramMetric(sine_gram(modes)));
}

std::vector<AnalyticBranch> damped_branches(int modes) {
  std::vector<AnalyticBranch> out;
  for (int n = 1; n <= modes; ++n) {
    const double n2 = static_cast<double>(n) * n;
    out.push_back({n2, 0, [n2](double s) { return n2 + s * s; }});
  }
  return out;
}

void require_modes(const DiscretizationConfig& cfg, int minimum) {
  if (cfg.modes < minimum) {
    throw NumericError(ErrorCode::InvalidArgument,
                       "need at least " + std::to_string(minimum) + " modes, got " + std::to_string(cfg.modes));
  }
  if (cfg.quad_points != 0 && cfg.quad_points < 4 * cfg.modes) {
    throw NumericError(ErrorCode::InvalidArgument, "quad_points must be >= 4 * modes");
  }
}

}  // namespace

int DiscretizationConfig::effective_quad_points() const {
  const int q = quad_points == 0 ? 4 * modes : quad_points;
  return (q + 3) / 4 * 4;
}

QuadratureRule composite_gauss(double a, double b, int points) {
  static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                  0.8611363115940526};
  static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                  0.3478548451374538};
  const int panels = std::max(1, (points + 3) / 4);
  const double h = (b - a) / panels;
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * 4);
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int j = 0; j < 4; ++j) {
      rule.nodes.push_back(mid + 0.5 * h * x[j]);
      rule.weights.push_back(0.5 * h * w[j]);
    }
  }
  return rule;
}

Mat sine_derivative_projection(int modes) {
  Mat n_mat = Mat::Zero(modes, modes);
  for (int m = 1; m <= modes; ++m) {
    for (int n = 1; n <= modes; ++n) {
      if ((m + n) % 2 == 0) continue;
      // (2/pi) int_0^pi cos(nt) sin(mt) dt = (2/pi) 2m / (m^2 - n^2) for m + n odd.
      const double proj = (2.0 / kPi) * 2.0 * m / (static_cast<double>(m) * m - static_cast<double>(n) * n);
      n_mat(m - 1, n - 1) = 2.0 * n * proj;
    }
  }
  return n_mat;
}

Vec sine_mode(int modes, int n) {
  Vec c = Vec::Zero(modes);
  const double nd = n;
  c(n - 1) = std::sqrt(2.0 / (1.0 + nd * nd * nd * nd));
  return c;
}

ProblemSpec build_example1(double l, double c, double n_plus1, double n_minus1) {
  if (c == 0.0) throw NumericError(ErrorCode::ZeroC, "example1 requires c != 0");
  // Quadratic interpolant through (1, N(1)) and (-1, N(-1)); only x = +-1 is ever evaluated.
  const double odd_part = 0.5 * (n_plus1 - n_minus1);
  const double even_part = 0.5 * (n_plus1 + n_minus1);
  ProblemSpec ps{
      Pencil(Mat::Constant(1, 1, l), Mat::Constant(1, 1, c), GramMetric::identity(1)),
      [=](const Vec& x) { return Vec::Constant(1, odd_part * x(0) + even_part * x(0) * x(0)); },
      [=](const Vec& x) { return Mat::Constant(1, 1, odd_part + 2.0 * even_part * x(0)); },
      [](const Vec& x, double) { return PointValue{Vec::Constant(1, x(0)), Vec::Zero(1)}; },
      "example1",
      {},
  };
  ps.analytic_branches = {
      {l / c, +1, [=](double s) { return (l + s * n_plus1) / c; }},
      {l / c, -1, [=](double s) { return (l - s * n_minus1) / c; }},
  };
  ps.odd = even_part == 0.0;
  return ps;
}

ProblemSpec build_example2(const DiscretizationConfig& cfg) {
  require_modes(cfg, 4);
  const int m = cfg.modes;
  auto n_mat = std::make_shared<const Mat>(sine_derivative_projection(m));
  ProblemSpec ps{
      sine_pencil(m),
      [n_mat](const Vec& c) -> Vec { return *n_mat * c; },
      [n_mat](const Vec&) -> Mat { return *n_mat; },
      sine_point,
      "example2",
      damped_branches(m),
  };
  ps.t_min = 0.0;
  ps.t_max = kPi;
  ps.scalar_dirichlet = true;
  return ps;
}

namespace {

/// Index of cos(nt) / sin(nt) within one component block [1, cos t, sin t, ...].
Eigen::Index cos_index(int n) { return 2 * n - 1; }
Eigen::Index sin_index(int n) { return 2 * n; }

PointValue trig_point(const Vec& c, double t, int modes) {
  const Eigen::Index block = 2 * modes + 1;
  PointValue out{Vec::Zero(2), Vec::Zero(2)};
  for (int comp = 0; comp < 2; ++comp) {
    const Eigen::Index off = comp * block;
    double v = c(off);
    double d = 0.0;
    for (int n = 1; n <= modes; ++n) {
      const double a = c(off + cos_index(n));
      const double b = c(off + sin_index(n));
      v += a * std::cos(n * t) + b * std::sin(n * t);
      d += n * (b * std::cos(n * t) - a * std::sin(n * t));
    }
    out.value(comp) = v;
    out.derivative(comp) = d;
  }
  return out;
}

}  // namespace

ProblemSpec build_example3(const DiscretizationConfig& cfg) {
  require_modes(cfg, 2);
  const int m = cfg.modes;
  const Eigen::Index block = 2 * m + 1;
  const Eigen::Index k = 2 * block;

  Mat d = Mat::Zero(block, block);
  Vec w(block);
  w(0) = 1.0;
  for (int n = 1; n <= m; ++n) {
    // (a cos + b sin)' = n b cos - n a sin
    d(cos_index(n), sin_index(n)) = n;
    d(sin_index(n), cos_index(n)) = -n;
    w(cos_index(n)) = w(sin_index(n)) = 0.5 * (1.0 + static_cast<double>(n) * n);
  }
  const Mat id = Mat::Identity(block, block);
  Mat l = Mat::Zero(k, k);
  l.topLeftCorner(block, block) = d + id;
  l.bottomRightCorner(block, block) = d - id;
  Mat c = Mat::Zero(k, k);
  c.topRightCorner(block, block) = id;
  c.bottomLeftCorner(block, block) = -id;
  Vec wk(k);
  wk << w, w;

  ProblemSpec ps{
      Pencil(std::move(l), std::move(c), GramMetric(Mat(wk.asDiagonal()))),
      [](const Vec& x) -> Vec { return -x; },
      [k](const Vec&) -> Mat { return -Mat::Identity(k, k); },
      [m](const Vec& x, double t) { return trig_point(x, t, m); },
      "example3",
      {},
  };
  ps.t_min = 0.0;
  ps.t_max = 2.0 * kPi;
  return ps;
}

Vec example3_circle_state(int modes, double theta) {
  const Eigen::Index block = 2 * modes + 1;
  Vec c = Vec::Zero(2 * block);
  c(0) = std::cos(theta / 2);
  c(block) = std::sin(theta / 2);
  return c;
}

namespace {

/// Quadrature tables shared read-only by n_eval / dn_eval.
struct AirTables {
  Mat derivative_basis;  // (Q x M): n cos(n t_q)
  Mat projection;        // (M x Q): (2/pi) w_q sin(m t_q)
  ScalarFn g;
  ScalarFn g_prime;
};

}  // namespace

ProblemSpec build_air_resistance(const DiscretizationConfig& cfg, ScalarFn g, ScalarFn g_prime) {
  require_modes(cfg, 4);
  if (static_cast<bool>(g) != static_cast<bool>(g_prime)) {
    throw NumericError(ErrorCode::InvalidArgument, "supply both g and g' or neither");
  }
  if (!g) {
    g = [](double v) { return v * std::abs(v); };
    g_prime = [](double v) { return 2.0 * std::abs(v); };
  }
  const int m = cfg.modes;
  const QuadratureRule rule = composite_gauss(0.0, kPi, cfg.effective_quad_points());
  const auto q = static_cast<Eigen::Index>(rule.nodes.size());

  auto tables = std::make_shared<AirTables>();
  tables->derivative_basis.resize(q, m);
  tables->projection.resize(m, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const double t = rule.nodes[static_cast<std::size_t>(j)];
    const double wt = rule.weights[static_cast<std::size_t>(j)];
    for (int n = 1; n <= m; ++n) {
      tables->derivative_basis(j, n - 1) = n * std::cos(n * t);
      tables->projection(n - 1, j) = (2.0 / kPi) * wt * std::sin(n * t);
    }
  }
  tables->g = std::move(g);
  tables->g_prime = std::move(g_prime);
  std::shared_ptr<const AirTables> shared = tables;

  ProblemSpec ps{
      sine_pencil(m),
      [shared](const Vec& c) -> Vec {
        Vec v = shared->derivative_basis * c;
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = shared->g(v(j));
        return shared->projection * v;
      },
      [shared](const Vec& c) -> Mat {
        Vec v = shared->derivative_basis * c;
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = shared->g_prime(v(j));
        return shared->projection * v.asDiagonal() * shared->derivative_basis;
      },
      sine_point,
      "air_resistance",
      {},
  };
  ps.t_min = 0.0;
  ps.t_max = kPi;
  ps.scalar_dirichlet = true;
  return ps;
}

PointValue eval_point(const ProblemSpec& ps, const Vec& c, double t) {
  if (t < ps.t_min - 1e-12 || t > ps.t_max + 1e-12) {
    throw NumericError(ErrorCode::InvalidArgument, "eval_point: t outside the problem interval");
  }
  return ps.point_eval(c, t);
}

}  // namespace twinpoint
