#include <doctest.h>

#include <random>

#include "twinpoint/errors.hpp"
#include "twinpoint/orientation.hpp"

using namespace twinpoint;

namespace {

Mat gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd;
  Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = nd(rng);
  return a;
}

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

int sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

TEST_CASE("det_admissible on small carriers") {
  const SignLog empty = det_admissible(Mat::Identity(3, 3), {});
  CHECK(empty.sign == 1);
  CHECK(empty.logabs == 0.0);

  const SignLog one = det_admissible(diag({1, 1, -2}), {Vec::Unit(3, 2)});
  CHECK(one.sign == -1);
  CHECK(one.logabs == doctest::Approx(std::log(2.0)));

  try {
    det_admissible(diag({1, 1, -2}), {Vec::Unit(3, 0)});
    FAIL("expected NotAdmissible");
  } catch (const NumericError& e) {
    CHECK(e.code() == ErrorCode::NotAdmissible);
  }
  CHECK_THROWS(det_admissible(diag({1, 2, 1}), {}));
}

TEST_CASE("det_admissible is invariant under the choice of carrier") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 7;
    const int r = 1 + trial % 3;
    const Mat u = gaussian(rng, k, r);
    const Mat t = Mat::Identity(k, k) + u * gaussian(rng, r, k);
    // Carriers: the image of I - T, and the image plus two random directions.
    std::vector<Vec> tight;
    std::vector<Vec> loose;
    for (int j = 0; j < r; ++j) tight.push_back(u.col(j));
    loose = tight;
    loose.push_back(gaussian(rng, k, 1).col(0));
    loose.push_back(gaussian(rng, k, 1).col(0));
    const SignLog a = det_admissible(t, tight);
    const SignLog b = det_admissible(t, loose);
    const SignLog full = det_sign_log(t);
    CHECK(a.sign == full.sign);
    CHECK(b.sign == full.sign);
    CHECK(std::abs(a.logabs - full.logabs) <= 1e-8);
    CHECK(std::abs(b.logabs - full.logabs) <= 1e-8);
  }
}

TEST_CASE("is_companion") {
  CHECK(is_companion(Mat::Identity(2, 2), Mat::Zero(2, 2)));
  CHECK_FALSE(is_companion(Mat::Zero(2, 2), Mat::Zero(2, 2)));
  CHECK(is_companion(diag({0, 1}), diag({1, 0})));
}

TEST_CASE("equivalent_companions") {
  std::mt19937_64 rng(2);
  const Mat t = gaussian(rng, 3, 3);
  const Mat k = gaussian(rng, 3, 3);
  CHECK(equivalent_companions(t, k, k));
  CHECK_FALSE(equivalent_companions(Mat::Zero(1, 1), Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, -1.0)));
  try {
    equivalent_companions(Mat::Zero(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2));
    FAIL("expected NotCompanion");
  } catch (const NumericError& e) {
    CHECK(e.code() == ErrorCode::NotCompanion);
  }
}

TEST_CASE("companions split into exactly two classes") {
  std::mt19937_64 rng(4);
  const Mat t = gaussian(rng, 4, 4);
  std::vector<Mat> ks;
  for (int i = 0; i < 100; ++i) ks.push_back(gaussian(rng, 4, 4));
  std::vector<int> label(ks.size(), -1);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (std::size_t r = 0; r < reps.size() && label[i] < 0; ++r) {
      if (equivalent_companions(t, ks[i], ks[reps[r]])) label[i] = static_cast<int>(r);
    }
    if (label[i] < 0) {
      label[i] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  }
  CHECK(reps.size() == 2);
  // Relation agrees with the labels on every pair: reflexive, symmetric, transitive.
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (std::size_t j = 0; j < ks.size(); j += 7) CHECK(equivalent_companions(t, ks[i], ks[j]) == (label[i] == label[j]));
}

TEST_CASE("four determinants of the companion ratio share a sign") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat t = gaussian(rng, 4, 3) * gaussian(rng, 3, 4);
    const Mat a = t + gaussian(rng, 4, 4);
    const Mat b = t + gaussian(rng, 4, 4);
    const int s = sgn((b.inverse() * a).determinant());
    CHECK(sgn((a * b.inverse()).determinant()) == s);
    CHECK(sgn((a.inverse() * b).determinant()) == s);
    CHECK(sgn((b * a.inverse()).determinant()) == s);
    CHECK(equivalent_companions(t, a - t, b - t) == (s > 0));
  }
}

TEST_CASE("sign_oriented") {
  CHECK(sign_oriented(OrientedOp(Mat::Identity(3, 3), Mat::Zero(3, 3))) == 1);
  CHECK(sign_oriented(OrientedOp(diag({1, 1, 0}), Mat::Identity(3, 3))) == 0);
  CHECK(is_companion(diag({-1, 1}), Mat::Zero(2, 2)));
  CHECK(sign_oriented(OrientedOp(diag({-1, 1}), diag({2, 0}))) == -1);
  CHECK_THROWS(OrientedOp(diag({0, 1}), Mat::Zero(2, 2)));
  CHECK(sign_oriented(OrientedOp::natural(diag({-1, 1}))) == 1);
  CHECK(sign_oriented(OrientedOp::canonical(diag({-1, 1}))) == -1);
  CHECK(sign_oriented(OrientedOp::canonical(diag({2, 3}))) == 1);
  CHECK(sign_oriented(OrientedOp::canonical(diag({0, 3}))) == 0);
}

TEST_CASE("oriented composition is multiplicative") {
  const OrientedOp n1 = OrientedOp::natural(diag({2, 3}));
  const OrientedOp n2 = OrientedOp::natural(diag({-1, 4}));
  const OrientedOp both = oriented_composition(n1, n2);
  CHECK(both.companion().cwiseAbs().maxCoeff() == 0.0);
  CHECK(sign_oriented(both) == 1);

  const OrientedOp neg(diag({-1, 1}), diag({2, 0}));
  CHECK(sign_oriented(oriented_composition(neg, n1)) == -1);
  CHECK((oriented_composition(neg, n1).op() - diag({2, 3}) * diag({-1, 1})).norm() == 0.0);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    Mat t1 = gaussian(rng, 5, 5);
    if (trial % 5 == 0) t1 = gaussian(rng, 5, 4) * gaussian(rng, 4, 5);
    const OrientedOp a(t1, gaussian(rng, 5, 5));
    const OrientedOp b(gaussian(rng, 5, 5), gaussian(rng, 5, 5));
    CHECK(sign_oriented(oriented_composition(a, b)) == sign_oriented(a) * sign_oriented(b));
  }
}

TEST_CASE("block triangular determinant") {
  const SignLog one = det_block_triangular({Mat::Zero(3, 1), Mat::Constant(1, 1, 1.0)});
  CHECK(one.sign == 1);
  CHECK(one.logabs == 0.0);
  Mat flip(2, 2);
  flip << 0, 1, 1, 0;
  std::mt19937_64 rng(13);
  CHECK(det_block_triangular({gaussian(rng, 4, 2), flip}).sign == -1);
  for (int trial = 0; trial < 100; ++trial) {
    const BlockTriangular b{gaussian(rng, 6, 3), gaussian(rng, 3, 3)};
    const SignLog blk = det_block_triangular(b);
    const SignLog full = det_sign_log(b.assemble());
    CHECK(blk.sign == full.sign);
    CHECK(std::abs(blk.logabs - full.logabs) <= 1e-8);
  }
}
