#include <doctest.h>

#include <random>

#include "twinpoint/errors.hpp"
#include "twinpoint/linops.hpp"

using namespace twinpoint;

namespace {

/// Laplace expansion along the first row.
double cofactor_det(const Mat& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  double det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Mat minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
        if (c != j) minor(r - 1, cc++) = a(r, c);
      }
    }
    det += ((j % 2) ? -1.0 : 1.0) * a(0, j) * cofactor_det(minor);
  }
  return det;
}

int sgn(double x) { return (x > 0) - (x < 0); }

Mat uniform(std::mt19937_64& rng, int rows, int cols, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = u(rng);
  return a;
}

}  // namespace

TEST_CASE("det_sign_log on fixed matrices") {
  const SignLog id = det_sign_log(Mat::Identity(3, 3));
  CHECK(id.sign == 1);
  CHECK(id.logabs == doctest::Approx(0.0));

  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  const SignLog sw = det_sign_log(swap);
  CHECK(sw.sign == -1);
  CHECK(sw.logabs == doctest::Approx(0.0));

  CHECK(det_sign_log(Mat::Zero(3, 3)).sign == 0);
  Mat rank1 = Vec::Ones(4) * Vec::LinSpaced(4, 1, 4).transpose();
  CHECK(det_sign_log(rank1).sign == 0);
}

TEST_CASE("det_sign_log matches cofactor expansion on random matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const Mat a = uniform(rng, n, n);
    const double oracle = cofactor_det(a);
    const SignLog d = det_sign_log(a);
    CHECK(d.sign == sgn(oracle));
    CHECK(d.logabs == doctest::Approx(std::log(std::abs(oracle))).epsilon(1e-9));
    LinopsConfig full;
    full.full_pivoting = true;
    CHECK(det_sign_log(a, full).sign == sgn(oracle));
  }
}

TEST_CASE("det_sign_log agrees with exact integer determinants") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-2, 2);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 5;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = entry(rng);
    // Integer determinants are exact in double for these sizes.
    const double oracle = std::round(cofactor_det(a));
    CHECK(det_sign_log(a).sign == sgn(oracle));
    checked += oracle == 0.0;
  }
  CHECK(checked > 0);
}

TEST_CASE("large matrices keep a finite log magnitude") {
  const Mat big = 1e3 * Mat::Identity(200, 200);
  const SignLog d = det_sign_log(big);
  CHECK(d.sign == 1);
  CHECK(d.logabs == doctest::Approx(200 * std::log(1e3)));
}

TEST_CASE("solve") {
  std::mt19937_64 rng(3);
  const Vec b = uniform(rng, 4, 1).col(0);
  CHECK((solve(Mat::Identity(4, 4), b) - b).norm() == doctest::Approx(0.0));
  CHECK((solve(Mat(2.0 * Mat::Identity(4, 4)), b) - b / 2).norm() == doctest::Approx(0.0));
  for (int trial = 0; trial < 500; ++trial) {
    const Mat a = uniform(rng, 8, 8) + 8.0 * Mat::Identity(8, 8);
    const Vec rhs = uniform(rng, 8, 1).col(0);
    const Vec x = solve(a, rhs);
    CHECK((a * x - rhs).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
  try {
    solve(Mat(Mat::Zero(2, 2)), Vec(Vec::Ones(2)));
    FAIL("expected SingularMatrix");
  } catch (const NumericError& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
}

TEST_CASE("kernel_basis") {
  CHECK(kernel_basis(Mat::Zero(3, 3), 1e-10).size() == 3);
  CHECK(kernel_basis(Mat::Identity(3, 3), 1e-10).empty());
  Vec d(3);
  d << 1, 1e-14, 2;
  const auto ker = kernel_basis(Mat(d.asDiagonal()), 1e-10);
  REQUIRE(ker.size() == 1);
  CHECK(std::abs(ker[0](1)) == doctest::Approx(1.0));

  Mat wide(2, 3);
  wide << 1, 0, 0, 0, 1, 0;
  const auto wk = kernel_basis(wide, 1e-10);
  REQUIRE(wk.size() == 1);
  CHECK(std::abs(wk[0](2)) == doctest::Approx(1.0));
}

TEST_CASE("GramMetric validates its matrix") {
  Mat asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  CHECK_THROWS(GramMetric(asym));
  Mat indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS(GramMetric(indefinite));
  CHECK_THROWS(GramMetric(Mat::Identity(2, 3)));
}

TEST_CASE("w_orthonormalize") {
  const GramMetric id = GramMetric::identity(2);
  const auto same = w_orthonormalize({Vec::Unit(2, 0), Vec::Unit(2, 1)}, id);
  CHECK((same[0] - Vec::Unit(2, 0)).norm() == doctest::Approx(0.0));
  CHECK((same[1] - Vec::Unit(2, 1)).norm() == doctest::Approx(0.0));

  const auto gs = w_orthonormalize({Vec::Unit(2, 0) + Vec::Unit(2, 1), Vec::Unit(2, 1)}, id);
  Vec e1(2), e2(2);
  e1 << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  e2 << -1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK((gs[0] - e1).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((gs[1] - e2).norm() == doctest::Approx(0.0).epsilon(1e-14));

  std::mt19937_64 rng(5);
  const GramMetric w(Mat(Vec::LinSpaced(5, 1, 5).asDiagonal()));
  std::vector<Vec> vs;
  for (int i = 0; i < 5; ++i) vs.push_back(uniform(rng, 5, 1).col(0));
  const auto on = w_orthonormalize(vs, w);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(w.inner(on[i], on[j]) - (i == j)) <= 1e-10);

  try {
    w_orthonormalize({Vec::Unit(3, 0), Vec(2.0 * Vec::Unit(3, 0))}, GramMetric::identity(3));
    FAIL("expected DependentInput");
  } catch (const NumericError& e) {
    CHECK(e.code() == ErrorCode::DependentInput);
  }
}

TEST_CASE("w_complement_basis") {
  const auto c3 = w_complement_basis(Vec(Vec::Unit(3, 0)), GramMetric::identity(3));
  REQUIRE(c3.size() == 2);
  for (const Vec& v : c3) CHECK(std::abs(v(0)) <= 1e-15);

  Vec diag(2);
  diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto c2 = w_complement_basis(diag, GramMetric::identity(2));
  REQUIRE(c2.size() == 1);
  CHECK(std::abs(c2[0](0) + c2[0](1)) <= 1e-14);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 7;
    const GramMetric w(Mat((uniform(rng, k, 1, 0.5, 3.0).col(0)).asDiagonal()));
    Vec x = uniform(rng, k, 1).col(0);
    x /= w.norm(x);
    const auto b = w_complement_basis(x, w);
    REQUIRE(b.size() == static_cast<std::size_t>(k - 1));
    Mat frame(k, k);
    frame.col(0) = x;
    for (int i = 0; i < k - 1; ++i) {
      frame.col(i + 1) = b[i];
      CHECK(std::abs(w.inner(b[i], x)) <= 1e-10);
      for (int j = 0; j < k - 1; ++j) CHECK(std::abs(w.inner(b[i], b[j]) - (i == j)) <= 1e-10);
    }
    CHECK(det_sign_log(frame).sign != 0);
  }
}
