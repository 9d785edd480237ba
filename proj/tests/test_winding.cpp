#include <doctest.h>

#include <complex>
#include <numbers>
#include <random>

#include "twinpoint/errors.hpp"
#include "twinpoint/winding.hpp"

using namespace twinpoint;

namespace {

constexpr double kPi = std::numbers::pi;

/// Coefficients of sin(n t) with unit amplitude.
Vec unit_sine(const ProblemSpec& ps, int modes, int n) {
  const Vec c = sine_mode(modes, n);
  return c / eval_point(ps, c, kPi / (2 * n)).value(0);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const NumericError& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("curve of sin t is the unit circle traversed once") {
  const ProblemSpec ps = build_example2({16, 0});
  const Vec c = unit_sine(ps, 16, 1);
  CHECK(std::abs(curve_j(ps, c, 0.0) - 1.0) <= 1e-12);
  CHECK(std::abs(curve_j(ps, c, kPi) + 1.0) <= 1e-12);
  CHECK(std::abs(curve_j(ps, c, 2 * kPi) - 1.0) <= 1e-12);
  for (double theta : {0.3, 1.9, 4.4}) {
    CHECK(std::abs(curve_j(ps, c, theta) - std::polar(1.0, theta)) <= 1e-12);
  }
}

TEST_CASE("curve of sin 2t is z squared on the circle") {
  const ProblemSpec ps = build_example2({16, 0});
  const Vec c = unit_sine(ps, 16, 2);
  for (int k = 0; k <= 12; ++k) {
    const double theta = 2 * kPi * k / 12;
    CHECK(std::abs(curve_j(ps, c, theta) - std::polar(1.0, 2 * theta)) <= 1e-12);
  }
}

TEST_CASE("sine modes wind n times and their negatives -n times") {
  const ProblemSpec ps = build_example2({64, 0});
  for (int n = 1; n <= 6; ++n) {
    const Vec c = sine_mode(64, n);
    CHECK(winding_number(ps, c).value == n);
    CHECK(winding_number(ps, Vec(-c)).value == -n);
  }
}

TEST_CASE("winding is invariant under positive scaling and refinement") {
  const ProblemSpec ps = build_example2({24, 0});
  std::mt19937_64 rng(61);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    Vec c = sine_mode(24, n);
    for (int i = 0; i < 24; ++i) c(i) += 0.05 * nd(rng) / (1 + i);
    WindingResult base;
    try {
      base = winding_number(ps, c);
    } catch (const NumericError&) {
      continue;
    }
    ++checked;
    CHECK(winding_number(ps, Vec(scale(rng) * c)).value == base.value);
    CHECK(winding_number(ps, c, {2048, 40, 1e-8}).value == base.value);
  }
  CHECK(checked >= 15);
}

TEST_CASE("degenerate inputs are rejected") {
  const ProblemSpec ps = build_example2({16, 0});
  const Vec a = unit_sine(ps, 16, 1);
  const Vec b = unit_sine(ps, 16, 2);
  // sin t - sin 2t / 2 has x'(0) = 0.
  const Vec flat = a - 0.5 * b;
  CHECK(code_of([&] { winding_number(ps, flat); }) == ErrorCode::DegenerateDerivative);
  CHECK(code_of([&] { curve_j(ps, flat, 1.0); }) == ErrorCode::DegenerateDerivative);

  // sin t (1 + cos t) vanishes together with its derivative at pi.
  const Vec touching = a + 0.5 * b;
  CHECK(code_of([&] { winding_number(ps, touching); }) == ErrorCode::OutsideX);
  CHECK(code_of([&] { curve_j(ps, touching, 2 * kPi); }) == ErrorCode::OutsideX);

  const ProblemSpec ex3 = build_example3({4, 0});
  CHECK(code_of([&] { winding_number(ex3, Vec::Ones(ex3.pencil.dim())); }) == ErrorCode::InvalidArgument);
  CHECK_THROWS_AS(winding_number(ex3, Vec::Ones(ex3.pencil.dim())), NumericError);
}

TEST_CASE("winding is constant along air resistance branches") {
  const ProblemSpec ps = build_air_resistance({24, 0});
  const SeedScan scan = find_trivial_seeds(ps, 0.5, 5.0);
  REQUIRE(scan.seeds.size() == 2);
  for (std::size_t i = 0; i < scan.seeds.size(); ++i) {
    for (int side : {1, -1}) {
      const auto& pt = side > 0 ? scan.seeds[i].point : scan.seeds[i].twin;
      ContinuationConfig cfg;
      cfg.r_max = 6.0;
      const Branch br = trace_branch(ps, State{0.0, pt.lambda, pt.x}, cfg);
      const BranchWinding w = branch_winding(ps, br);
      CHECK(w.constant);
      REQUIRE(w.values.size() == br.points.size());
      CHECK(w.values.front() == side * int(i + 1));
    }
  }
}
