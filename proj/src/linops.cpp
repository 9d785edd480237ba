#include "twinpoint/linops.hpp"

#include <algorithm>
#include <string>

#include "twinpoint/errors.hpp"

namespace twinpoint {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DependentInput: return "DependentInput";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::NotCompanion: return "NotCompanion";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::EpsilonStraddles: return "EpsilonStraddles";
    case ErrorCode::SplittingDegenerate: return "SplittingDegenerate";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::ZeroC: return "ZeroC";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::CorrectorFailure: return "CorrectorFailure";
    case ErrorCode::NonSimpleEncounter: return "NonSimpleEncounter";
    case ErrorCode::OutsideX: return "OutsideX";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::NotResolved: return "NotResolved";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

GramMetric::GramMetric(Mat w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols() || w_.rows() == 0) {
    throw NumericError(ErrorCode::InvalidArgument, "Gram matrix must be square and non-empty");
  }
  if (!all_finite(w_)) {
    throw NumericError(ErrorCode::InvalidArgument, "Gram matrix has non-finite entries");
  }
  if (!(w_ - w_.transpose()).isZero(0.0)) {
    throw NumericError(ErrorCode::InvalidArgument, "Gram matrix is not symmetric");
  }
  Eigen::LLT<Mat> llt(w_);
  if (llt.info() != Eigen::Success) {
    throw NumericError(ErrorCode::InvalidArgument, "Gram matrix is not positive definite");
  }
}

bool all_finite(const Mat& a) { return a.allFinite(); }

namespace {

SignLog sign_log_from_pivots(const Eigen::VectorXd& pivots, int perm_sign, double threshold) {
  SignLog out{perm_sign, 0.0};
  bool degenerate = false;
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    const double p = pivots(i);
    if (p == 0.0 || std::abs(p) <= threshold) degenerate = true;
    if (p < 0) out.sign = -out.sign;
    out.logabs += std::log(std::abs(p));
  }
  if (degenerate) out.sign = 0;
  return out;
}

}  // namespace

SignLog det_sign_log(const Mat& a, const LinopsConfig& cfg) {
  if (a.rows() != a.cols()) {
    throw NumericError(ErrorCode::InvalidArgument, "det_sign_log needs a square matrix");
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return {1, 0.0};
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return SignLog::singular();
  const double threshold = cfg.rank_tol * scale * static_cast<double>(n);

  if (cfg.full_pivoting) {
    Eigen::FullPivLU<Mat> lu(a);
    const int perm = static_cast<int>(lu.permutationP().determinant() *
                                      lu.permutationQ().determinant());
    return sign_log_from_pivots(lu.matrixLU().diagonal(), perm, threshold);
  }
  Eigen::PartialPivLU<Mat> lu(a);
  const int perm = static_cast<int>(lu.permutationP().determinant());
  return sign_log_from_pivots(lu.matrixLU().diagonal(), perm, threshold);
}

Vec solve(const Mat& a, const Vec& b, const LinopsConfig& cfg) {
  Mat rhs = b;
  return solve(a, rhs, cfg).col(0);
}

Mat solve(const Mat& a, const Mat& b, const LinopsConfig& cfg) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw NumericError(ErrorCode::InvalidArgument, "solve: dimension mismatch");
  }
  if (det_sign_log(a, cfg).sign == 0) {
    throw NumericError(ErrorCode::SingularMatrix,
                       "matrix of size " + std::to_string(a.rows()) + " is numerically singular");
  }
  if (cfg.full_pivoting) return Eigen::FullPivLU<Mat>(a).solve(b);
  return Eigen::PartialPivLU<Mat>(a).solve(b);
}

std::vector<Vec> kernel_basis(const Mat& a, double tau, double scale) {
  if (!(tau > 0)) throw NumericError(ErrorCode::InvalidArgument, "kernel_basis: tau must be > 0");
  const Eigen::Index n = a.cols();
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = tau * std::max(smax, scale);
  std::vector<Vec> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool in_kernel = i >= sv.size() || sv(i) <= threshold;
    if (in_kernel) out.emplace_back(svd.matrixV().col(i));
  }
  return out;
}

std::vector<Vec> w_orthonormalize(const std::vector<Vec>& vs, const GramMetric& w,
                                  const LinopsConfig& cfg) {
  std::vector<Vec> out;
  out.reserve(vs.size());
  for (const Vec& v : vs) {
    const double original = w.norm(v);
    Vec u = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& q : out) u -= w.inner(q, u) * q;
    }
    const double nrm = w.norm(u);
    if (!(nrm > cfg.rank_tol * std::max(1.0, original))) {
      throw NumericError(ErrorCode::DependentInput,
                         "candidate " + std::to_string(out.size()) + " lies in the span of the previous ones");
    }
    out.push_back(u / nrm);
  }
  return out;
}

std::vector<Vec> w_complement_basis(const Vec& x, const GramMetric& w, const LinopsConfig& cfg) {
  const double nrm = w.norm(x);
  if (!(nrm * nrm > cfg.rank_tol)) {
    throw NumericError(ErrorCode::InvalidArgument, "w_complement_basis: x has vanishing W-norm");
  }
  return w_complement_basis(std::vector<Vec>{x / nrm}, w, cfg);
}

std::vector<Vec> w_complement_basis(const std::vector<Vec>& xs, const GramMetric& w,
                                    const LinopsConfig& cfg) {
  const Eigen::Index k = w.dim();
  std::vector<Vec> basis = w_orthonormalize(xs, w, cfg);
  const std::size_t fixed = basis.size();

  // Column i holds the residual of e_i after projecting out the current basis.
  Mat residual = Mat::Identity(k, k);
  const Mat& wm = w.matrix();
  for (const Vec& q : basis) residual -= q * (q.transpose() * wm * residual);

  std::vector<bool> used(static_cast<std::size_t>(k), false);
  while (static_cast<Eigen::Index>(basis.size()) < k) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double r = std::sqrt(std::max(0.0, residual.col(i).dot(wm * residual.col(i))));
      if (r > best_norm * (1.0 + 1e-12)) {
        best = i;
        best_norm = r;
      }
    }
    if (best < 0 || !(best_norm > cfg.rank_tol)) {
      throw NumericError(ErrorCode::DependentInput, "w_complement_basis: no independent candidate left");
    }
    used[static_cast<std::size_t>(best)] = true;
    Vec q = residual.col(best);
    for (const Vec& p : basis) q -= w.inner(p, q) * p;
    q /= w.norm(q);
    basis.push_back(q);
    residual -= q * (q.transpose() * wm * residual);
  }
  return {basis.begin() + static_cast<std::ptrdiff_t>(fixed), basis.end()};
}

Mat columns(const std::vector<Vec>& vs, Eigen::Index rows) {
  Mat out(rows, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = vs[j];
  return out;
}

}  // namespace twinpoint
