#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace twinpoint {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Determinant carried as sign and log-magnitude so large pencils do not
/// overflow. sign == 0 marks a numerically singular matrix.
struct SignLog {
  int sign = 1;
  double logabs = 0.0;

  static SignLog singular() { return {0, -std::numeric_limits<double>::infinity()}; }
};

struct LinopsConfig {
  double rank_tol = 1e-10;
  bool full_pivoting = false;
};

/// Symmetric positive definite Gram matrix defining <u,v>_W = u^T W v.
/// Construction symmetrizes nothing: W must already be exactly symmetric,
/// and a Cholesky factorization certifies definiteness.
class GramMetric {
 public:
  explicit GramMetric(Mat w);

  static GramMetric identity(Eigen::Index k) { return GramMetric(Mat::Identity(k, k)); }

  const Mat& matrix() const { return w_; }
  Eigen::Index dim() const { return w_.rows(); }

  double inner(const Vec& u, const Vec& v) const { return u.dot(w_ * v); }
  double norm(const Vec& u) const { return std::sqrt(inner(u, u)); }

 private:
  Mat w_;
};

bool all_finite(const Mat& a);

SignLog det_sign_log(const Mat& a, const LinopsConfig& cfg = {});

/// Solves A x = b. Throws NumericError(SingularMatrix) when det_sign_log
/// reports sign 0.
Vec solve(const Mat& a, const Vec& b, const LinopsConfig& cfg = {});
Mat solve(const Mat& a, const Mat& b, const LinopsConfig& cfg = {});

/// Euclidean-orthonormal basis of the numerical kernel: right singular
/// vectors whose singular value is <= tau * max(sigma_max, scale). A caller
/// that knows the magnitude of the data passes it as `scale`; this matters
/// when A itself is tiny, e.g. a 1 x 1 matrix at a computed root.
std::vector<Vec> kernel_basis(const Mat& a, double tau, double scale = 0.0);

/// Gram-Schmidt in the W inner product (two passes).
std::vector<Vec> w_orthonormalize(const std::vector<Vec>& vs, const GramMetric& w,
                                  const LinopsConfig& cfg = {});

/// k-1 W-orthonormal vectors spanning the W-orthogonal complement of x.
/// Candidates are the coordinate vectors, picked greedily by largest
/// residual after projection (ties resolved by lowest index).
std::vector<Vec> w_complement_basis(const Vec& x, const GramMetric& w,
                                    const LinopsConfig& cfg = {});

/// Same as above for the complement of span(xs); xs must be W-orthonormal.
std::vector<Vec> w_complement_basis(const std::vector<Vec>& xs, const GramMetric& w,
                                    const LinopsConfig& cfg = {});

Mat columns(const std::vector<Vec>& vs, Eigen::Index rows);

}  // namespace twinpoint
