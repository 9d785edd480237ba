#include "twinpoint/winding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "twinpoint/errors.hpp"

namespace twinpoint {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_scalar(const ProblemSpec& ps) {
  if (!ps.scalar_dirichlet) {
    throw NumericError(ErrorCode::InvalidArgument, "the winding map needs a scalar Dirichlet problem, got " + ps.label);
  }
}

struct Sample {
  double x;
  double dx;
};

Sample sample(const ProblemSpec& ps, const Vec& c, double t) {
  const PointValue pv = eval_point(ps, c, t);
  return {pv.value(0), pv.derivative(0)};
}

/// j = z^2 / |z|^2 with z = x'(theta/2) + i x'(0) x(theta/2).
std::complex<double> z_value(const Sample& at, double d0) { return {at.dx, d0 * at.x}; }

std::complex<double> j_value(const Sample& at, double d0) {
  const std::complex<double> z = z_value(at, d0);
  return z * z / std::norm(z);
}

}  // namespace

std::complex<double> curve_j(const ProblemSpec& ps, const Vec& c, double theta, double eps_gap, double gap_scale) {
  require_scalar(ps);
  if (gap_scale <= 0.0) gap_scale = ps.pencil.W().inner(c, c);
  const double d0 = sample(ps, c, 0.0).dx;
  if (d0 * d0 <= eps_gap * gap_scale) {
    throw NumericError(ErrorCode::DegenerateDerivative, "x'(0) vanishes");
  }
  const Sample at = sample(ps, c, 0.5 * theta);
  if (at.x * at.x + at.dx * at.dx <= eps_gap * gap_scale) {
    throw NumericError(ErrorCode::OutsideX, "x and x' vanish together at t = " + std::to_string(0.5 * theta));
  }
  return j_value(at, d0);
}

WindingResult winding_number(const ProblemSpec& ps, const Vec& c, const WindingConfig& cfg) {
  require_scalar(ps);
  if (cfg.samples < 4) throw NumericError(ErrorCode::InvalidArgument, "winding samples must be >= 4");
  const double d0 = sample(ps, c, 0.0).dx;
  const int n = cfg.samples;

  std::vector<Sample> grid(static_cast<std::size_t>(n) + 1);
  double peak = d0 * d0;
  for (int i = 0; i <= n; ++i) {
    grid[static_cast<std::size_t>(i)] = sample(ps, c, 0.5 * kTwoPi * i / n);
    const Sample& g = grid[static_cast<std::size_t>(i)];
    peak = std::max(peak, g.x * g.x + g.dx * g.dx);
  }
  if (d0 * d0 <= cfg.eps_gap * peak) throw NumericError(ErrorCode::DegenerateDerivative, "x'(0) vanishes");

  WindingResult res;
  res.min_gap = std::numeric_limits<double>::infinity();
  res.samples_used = n + 1;
  auto checked = [&](const Sample& g, double theta) {
    const double gap = g.x * g.x + g.dx * g.dx;
    res.min_gap = std::min(res.min_gap, gap);
    if (gap <= cfg.eps_gap * peak) {
      throw NumericError(ErrorCode::OutsideX, "x and x' vanish together at t = " + std::to_string(0.5 * theta));
    }
    return z_value(g, d0);
  };

  // arg j = 2 arg z, so j's argument is accumulated through z: squaring would
  // hide a half-turn of z inside one interval. Intervals whose j-step reaches
  // pi/2 are bisected locally.
  std::function<double(double, std::complex<double>, double, std::complex<double>, int)> accumulate =
      [&](double a, std::complex<double> za, double b, std::complex<double> zb, int depth) -> double {
    const double step = 2.0 * std::arg(zb / za);
    if (std::abs(step) < 0.5 * std::numbers::pi) {
      res.max_arg_step = std::max(res.max_arg_step, std::abs(step));
      return step;
    }
    if (depth == cfg.max_refinements) {
      throw NumericError(ErrorCode::NotResolved,
                         "argument step above pi/2 after " + std::to_string(depth) + " bisections near theta = " +
                             std::to_string(a));
    }
    const double mid = 0.5 * (a + b);
    ++res.samples_used;
    const std::complex<double> zm = checked(sample(ps, c, 0.5 * mid), mid);
    return accumulate(a, za, mid, zm, depth + 1) + accumulate(mid, zm, b, zb, depth + 1);
  };

  double total = 0.0;
  std::complex<double> prev = checked(grid[0], 0.0);
  for (int i = 1; i <= n; ++i) {
    const double theta = kTwoPi * i / n;
    const std::complex<double> z = checked(grid[static_cast<std::size_t>(i)], theta);
    total += accumulate(kTwoPi * (i - 1) / n, prev, theta, z, 0);
    prev = z;
  }
  const double turns = total / kTwoPi;
  res.value = static_cast<int>(std::lround(turns));
  if (std::abs(turns - res.value) > 1e-6) {
    throw NumericError(ErrorCode::NotResolved, "accumulated argument is not a multiple of 2 pi");
  }
  return res;
}

BranchWinding branch_winding(const ProblemSpec& ps, const Branch& branch, const WindingConfig& cfg) {
  require_scalar(ps);
  const std::size_t count = branch.points.size();
  BranchWinding out;
  out.values.assign(count, 0);
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  const std::size_t chunk = (count + workers - 1) / std::max<std::size_t>(workers, 1);

  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    const std::size_t end = std::min(count, begin + chunk);
    jobs.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          out.values[i] = winding_number(ps, branch.points[i].state.c, cfg).value;
        } catch (const NumericError& e) {
          throw NumericError(e.code(), "branch point " + std::to_string(i) + ": " + e.what());
        }
      }
    }));
  }
  for (auto& j : jobs) j.get();
  out.constant = std::adjacent_find(out.values.begin(), out.values.end(), std::not_equal_to<>()) == out.values.end();
  return out;
}

}  // namespace twinpoint
