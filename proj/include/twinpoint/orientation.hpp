#pragma once

#include <vector>

#include "twinpoint/linops.hpp"

namespace twinpoint {

/// A square operator together with a representative of its class of
/// positive companions. In finite dimension every matrix is finite rank,
/// so any K with T + K invertible is a companion.
class OrientedOp {
 public:
  OrientedOp(Mat t, Mat positive_companion, const LinopsConfig& cfg = {});

  /// Orientation whose positive class contains the zero operator. T must be invertible.
  static OrientedOp natural(Mat t, const LinopsConfig& cfg = {});

  /// Orientation whose positive companions K satisfy det(T + K) > 0.
  static OrientedOp canonical(Mat t, const LinopsConfig& cfg = {});

  const Mat& op() const { return t_; }
  const Mat& companion() const { return k_; }
  Eigen::Index dim() const { return t_.rows(); }

 private:
  Mat t_;
  Mat k_;
};

/// Block operator [[I, T12], [0, T22]] on E1 x E2.
struct BlockTriangular {
  Mat t12;
  Mat t22;

  Eigen::Index dim1() const { return t12.rows(); }
  Eigen::Index dim2() const { return t22.rows(); }
  Mat assemble() const;
};

/// Determinant of an admissible T (I - T of finite rank) computed on the
/// carrier span(subspace), which must contain Im(I - T).
SignLog det_admissible(const Mat& t, const std::vector<Vec>& subspace, const LinopsConfig& cfg = {});

bool is_companion(const Mat& t, const Mat& k, const LinopsConfig& cfg = {});

/// K1 ~ K2 iff det((T+K2)^-1 (T+K1)) > 0, evaluated as a product of two
/// factorization signs.
bool equivalent_companions(const Mat& t, const Mat& k1, const Mat& k2, const LinopsConfig& cfg = {});

/// +1 if T is invertible and naturally oriented, -1 if invertible and not, 0 if singular.
int sign_oriented(const OrientedOp& op, const LinopsConfig& cfg = {});

/// T2 T1 with positive companion (T2 + K2)(T1 + K1) - T2 T1.
OrientedOp oriented_composition(const OrientedOp& first, const OrientedOp& second,
                                const LinopsConfig& cfg = {});

SignLog det_block_triangular(const BlockTriangular& b, const LinopsConfig& cfg = {});

}  // namespace twinpoint
