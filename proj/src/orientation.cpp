#include "twinpoint/orientation.hpp"

#include <string>

#include "twinpoint/errors.hpp"

namespace twinpoint {

OrientedOp::OrientedOp(Mat t, Mat positive_companion, const LinopsConfig& cfg)
    : t_(std::move(t)), k_(std::move(positive_companion)) {
  if (t_.rows() != t_.cols() || k_.rows() != t_.rows() || k_.cols() != t_.cols()) {
    throw NumericError(ErrorCode::InvalidArgument, "oriented operator needs square T and K of equal size");
  }
  if (!is_companion(t_, k_, cfg)) {
    throw NumericError(ErrorCode::NotCompanion, "T + K is singular");
  }
}

OrientedOp OrientedOp::natural(Mat t, const LinopsConfig& cfg) {
  Mat zero = Mat::Zero(t.rows(), t.cols());
  return OrientedOp(std::move(t), std::move(zero), cfg);
}

OrientedOp OrientedOp::canonical(Mat t, const LinopsConfig& cfg) {
  const Eigen::Index n = t.rows();
  const SignLog d = det_sign_log(t, cfg);
  if (d.sign > 0) return natural(std::move(t), cfg);
  if (d.sign < 0) {
    // Negating the first column flips the determinant.
    Mat k = Mat::Zero(n, n);
    k.col(0) = -2.0 * t.col(0);
    return OrientedOp(std::move(t), std::move(k), cfg);
  }
  // Shifting by more than the spectral radius leaves every eigenvalue in the
  // right half plane, so det(T + shift I) > 0.
  const double shift = t.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  Mat k = shift * Mat::Identity(n, n);
  return OrientedOp(std::move(t), std::move(k), cfg);
}

Mat BlockTriangular::assemble() const {
  const Eigen::Index n1 = dim1();
  const Eigen::Index n2 = dim2();
  Mat full = Mat::Zero(n1 + n2, n1 + n2);
  full.topLeftCorner(n1, n1).setIdentity();
  full.topRightCorner(n1, n2) = t12;
  full.bottomRightCorner(n2, n2) = t22;
  return full;
}

SignLog det_admissible(const Mat& t, const std::vector<Vec>& subspace, const LinopsConfig& cfg) {
  const Eigen::Index n = t.rows();
  if (t.cols() != n) throw NumericError(ErrorCode::InvalidArgument, "det_admissible: T not square");
  const Mat defect = Mat::Identity(n, n) - t;
  const double scale = std::max(1.0, defect.cwiseAbs().maxCoeff());

  if (subspace.empty()) {
    if (defect.cwiseAbs().maxCoeff() > 1e-8 * scale) {
      throw NumericError(ErrorCode::NotAdmissible, "Im(I - T) is not contained in {0}");
    }
    return {1, 0.0};
  }

  const Mat basis = columns(subspace, n);
  Eigen::ColPivHouseholderQR<Mat> qr(basis);
  qr.setThreshold(cfg.rank_tol);
  if (qr.rank() < basis.cols()) {
    throw NumericError(ErrorCode::InvalidArgument, "det_admissible: carrier vectors are dependent");
  }

  // Columns of I - T must lie in the carrier.
  const Mat coeffs = qr.solve(defect);
  const double leak = (basis * coeffs - defect).cwiseAbs().maxCoeff();
  if (leak > 1e-8 * scale) {
    throw NumericError(ErrorCode::NotAdmissible,
                       "Im(I - T) leaves the carrier (residual " + std::to_string(leak) + ")");
  }

  // T maps the carrier into itself; express the restriction in the carrier basis.
  const Mat restricted = qr.solve(Mat(t * basis));
  return det_sign_log(restricted, cfg);
}

bool is_companion(const Mat& t, const Mat& k, const LinopsConfig& cfg) {
  if (t.rows() != k.rows() || t.cols() != k.cols()) {
    throw NumericError(ErrorCode::InvalidArgument, "is_companion: dimension mismatch");
  }
  return det_sign_log(t + k, cfg).sign != 0;
}

bool equivalent_companions(const Mat& t, const Mat& k1, const Mat& k2, const LinopsConfig& cfg) {
  const int s1 = det_sign_log(t + k1, cfg).sign;
  const int s2 = det_sign_log(t + k2, cfg).sign;
  if (s1 == 0 || s2 == 0) {
    throw NumericError(ErrorCode::NotCompanion, s1 == 0 ? "K1 is not a companion" : "K2 is not a companion");
  }
  return s1 * s2 > 0;
}

int sign_oriented(const OrientedOp& op, const LinopsConfig& cfg) {
  const int st = det_sign_log(op.op(), cfg).sign;
  if (st == 0) return 0;
  return det_sign_log(op.op() + op.companion(), cfg).sign * st;
}

OrientedOp oriented_composition(const OrientedOp& first, const OrientedOp& second,
                                const LinopsConfig& cfg) {
  if (first.dim() != second.dim()) {
    throw NumericError(ErrorCode::InvalidArgument, "oriented_composition: dimension mismatch");
  }
  Mat product = second.op() * first.op();
  Mat k = (second.op() + second.companion()) * (first.op() + first.companion()) - product;
  return OrientedOp(std::move(product), std::move(k), cfg);
}

SignLog det_block_triangular(const BlockTriangular& b, const LinopsConfig& cfg) {
  if (b.t22.rows() != b.t22.cols() || b.t22.rows() < 1 || b.t12.cols() != b.t22.rows()) {
    throw NumericError(ErrorCode::InvalidArgument, "malformed block-triangular operator");
  }
  return det_sign_log(b.t22, cfg);
}

}  // namespace twinpoint
