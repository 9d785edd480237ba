#include "twinpoint/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twinpoint/errors.hpp"
#include "twinpoint/orientation.hpp"

namespace twinpoint {

Pencil::Pencil(Mat l, Mat c, GramMetric w, const LinopsConfig& cfg)
    : l_(std::move(l)), c_(std::move(c)), w_(std::move(w)) {
  const Eigen::Index k = l_.rows();
  if (k == 0 || l_.cols() != k || c_.rows() != k || c_.cols() != k || w_.dim() != k) {
    throw NumericError(ErrorCode::InvalidArgument, "pencil matrices must be square with equal size");
  }
  if (!all_finite(l_) || !all_finite(c_)) {
    throw NumericError(ErrorCode::InvalidArgument, "pencil has non-finite entries");
  }
  const double scale = std::max(1.0, l_.cwiseAbs().maxCoeff() / std::max(1e-300, c_.cwiseAbs().maxCoeff()));
  for (double probe : {0.0, 0.5772156649, -1.4142135623, 2.7182818284, -3.1415926535, 7.389056099}) {
    if (det_sign_log(at(probe * scale), cfg).sign != 0) return;
  }
  throw NumericError(ErrorCode::InvalidArgument, "L - lambda C is singular at every sampled lambda");
}

bool is_eigenpoint(const Pencil& p, const Eigenpoint& e, double tol) {
  if (e.x.size() != p.dim()) return false;
  const double unit = p.W().inner(e.x, e.x);
  const Vec r = p.at(e.lambda) * e.x;
  return std::abs(unit - 1.0) <= 1e-10 && r.cwiseAbs().maxCoeff() <= tol;
}

SignLog delta(const Pencil& p, double lambda, const LinopsConfig& cfg) {
  return det_sign_log(p.at(lambda), cfg);
}

namespace {

double smallest_singular_value(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double golden_minimize(const Pencil& p, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = smallest_singular_value(p.at(x1));
  double f2 = smallest_singular_value(p.at(x2));
  for (int it = 0; it < 200 && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = smallest_singular_value(p.at(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = smallest_singular_value(p.at(x2));
    }
  }
  return f1 <= f2 ? x1 : x2;
}

/// Magnitude of L - lambda C used as the reference for kernel detection.
double pencil_scale(const Pencil& p, double lambda) {
  return p.L().cwiseAbs().maxCoeff() + std::abs(lambda) * p.C().cwiseAbs().maxCoeff();
}

bool has_kernel(const Pencil& p, double lambda, double tol) {
  return !kernel_basis(p.at(lambda), tol, pencil_scale(p, lambda)).empty();
}

}  // namespace

ScanResult scan_eigenvalues(const Pencil& p, double lo, double hi, int grid_n, const ScanConfig& cfg) {
  if (!(lo < hi) || grid_n < 2) {
    throw NumericError(ErrorCode::InvalidArgument, "scan_eigenvalues needs lo < hi and grid_n >= 2");
  }
  const LinopsConfig raw{0.0, cfg.lin.full_pivoting};
  const double step = (hi - lo) / (grid_n - 1);
  std::vector<double> grid(static_cast<std::size_t>(grid_n));
  std::vector<SignLog> dets(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = i + 1 == grid.size() ? hi : lo + static_cast<double>(i) * step;
    dets[i] = delta(p, grid[i], raw);
  }

  std::vector<double> found;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (dets[i].sign == 0 && has_kernel(p, grid[i], cfg.kernel_tol)) found.push_back(grid[i]);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const int sa = dets[i].sign;
    const int sb = dets[i + 1].sign;
    if (sa == 0 || sb == 0 || sa == sb) continue;
    double a = grid[i];
    double b = grid[i + 1];
    while (b - a > cfg.tau_bisect) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const int sm = delta(p, mid, raw).sign;
      if (sm == 0) {
        a = b = mid;
        break;
      }
      if (sm == sa) a = mid; else b = mid;
    }
    found.push_back(0.5 * (a + b));
  }

  // Even-multiplicity crossings leave the sign unchanged; look for steep dips.
  // A dip next to a sign change usually re-finds that root and is merged below.
  // Depth is measured against the lower of the highest values within `reach`
  // grid points on either side, since log|det| drifts across a wide window.
  const std::size_t n = grid.size();
  const std::size_t reach = std::max<std::size_t>(2, n / 50);
  for (std::size_t i = 0; i < n; ++i) {
    const double li = dets[i].logabs;
    if (!std::isfinite(li)) continue;
    const bool left_ok = i == 0 || li <= dets[i - 1].logabs;
    const bool right_ok = i + 1 == n || li <= dets[i + 1].logabs;
    if (!left_ok || !right_ok) continue;
    double left_peak = -std::numeric_limits<double>::infinity();
    double right_peak = left_peak;
    for (std::size_t d = 1; d <= reach; ++d) {
      if (i >= d) left_peak = std::max(left_peak, dets[i - d].logabs);
      if (i + d < n) right_peak = std::max(right_peak, dets[i + d].logabs);
    }
    const double baseline = i == 0 ? right_peak : i + 1 == n ? left_peak : std::min(left_peak, right_peak);
    if (!(li < baseline - cfg.dip_depth)) continue;
    const double a = grid[i > 0 ? i - 1 : i];
    const double b = grid[i + 1 < n ? i + 1 : i];
    const double candidate = golden_minimize(p, a, b);
    if (has_kernel(p, candidate, cfg.kernel_tol)) found.push_back(candidate);
  }

  std::sort(found.begin(), found.end());
  ScanResult out;
  for (double v : found) {
    if (v < lo || v > hi) continue;
    if (!out.eigenvalues.empty() && v - out.eigenvalues.back() <= cfg.tau_dedup) continue;
    out.eigenvalues.push_back(v);
  }
  for (std::size_t i = 1; i < out.eigenvalues.size(); ++i) {
    const auto cell_a = static_cast<long>(std::floor((out.eigenvalues[i - 1] - lo) / step));
    const auto cell_b = static_cast<long>(std::floor((out.eigenvalues[i] - lo) / step));
    if (cell_a == cell_b) out.grid_too_coarse = true;
  }
  return out;
}

SimplicityReport check_simple(const Pencil& p, double lambda_star, const ScanConfig& cfg) {
  const Mat t = p.at(lambda_star);
  const std::vector<Vec> kernel = kernel_basis(t, cfg.kernel_tol, pencil_scale(p, lambda_star));
  if (kernel.empty()) {
    throw NumericError(ErrorCode::NotAnEigenvalue, "L - lambda C has trivial kernel at lambda = " +
                                                       std::to_string(lambda_star));
  }
  SimplicityReport report;
  report.kernel_dim = static_cast<int>(kernel.size());
  if (report.kernel_dim != 1) return report;

  Vec x = kernel.front() / p.W().norm(kernel.front());
  Eigen::Index pivot = 0;
  x.cwiseAbs().maxCoeff(&pivot);
  if (x(pivot) < 0) x = -x;

  // H = Im T + R C x*  iff  [T b_1 ... T b_{k-1} | C x*] is invertible.
  const Eigen::Index k = p.dim();
  const std::vector<Vec> complement = w_complement_basis(x, p.W(), cfg.lin);
  Mat aug(k, k);
  for (std::size_t j = 0; j < complement.size(); ++j) aug.col(static_cast<Eigen::Index>(j)) = t * complement[j];
  aug.col(k - 1) = p.C() * x;
  report.transversal = kernel_basis(aug, cfg.kernel_tol).empty();
  report.x_star = std::move(x);
  return report;
}

int sign_jump(const Pencil& p, double lambda_star, double eps, const LinopsConfig& cfg) {
  const int below = delta(p, lambda_star - eps, cfg).sign;
  const int above = delta(p, lambda_star + eps, cfg).sign;
  if (below == 0 || above == 0) {
    throw NumericError(ErrorCode::EpsilonStraddles, "delta vanishes at lambda* +- eps");
  }
  return (below - above) / 2;
}

double default_jump_epsilon(const std::vector<double>& eigenvalues, std::size_t i) {
  double gap = std::numeric_limits<double>::infinity();
  if (i > 0) gap = std::min(gap, eigenvalues[i] - eigenvalues[i - 1]);
  if (i + 1 < eigenvalues.size()) gap = std::min(gap, eigenvalues[i + 1] - eigenvalues[i]);
  return std::min(0.5 * gap, 1e-2);
}

namespace {

void require_meridian_inputs(const Pencil& p, const Eigenpoint& e, const Vec& x_e) {
  if (p.dim() < 2) throw NumericError(ErrorCode::InvalidArgument, "meridian needs dimension >= 2");
  if (e.x.size() != p.dim() || x_e.size() != p.dim()) {
    throw NumericError(ErrorCode::InvalidArgument, "eigenvector / equator dimension mismatch");
  }
  const GramMetric& w = p.W();
  if (std::abs(w.inner(x_e, x_e) - 1.0) > 1e-8 || std::abs(w.inner(x_e, e.x)) > 1e-8) {
    throw NumericError(ErrorCode::InvalidArgument, "x_e must be W-unit and W-orthogonal to x*");
  }
}

/// Columns [T g_1 .. T g_{k-2} | T x_e | C x*] of the sigma isomorphism.
Mat sigma_matrix(const Pencil& p, const Mat& t, const std::vector<Vec>& g, const Vec& x_star, const Vec& x_e) {
  const Eigen::Index k = p.dim();
  Mat s(k, k);
  for (std::size_t j = 0; j < g.size(); ++j) s.col(static_cast<Eigen::Index>(j)) = t * g[j];
  s.col(k - 2) = t * x_e;
  s.col(k - 1) = p.C() * x_star;
  return s;
}

}  // namespace

CxeDecomposition decompose_Cxe(const Pencil& p, const Eigenpoint& e, const Vec& x_e, const LinopsConfig& cfg) {
  require_meridian_inputs(p, e, x_e);
  const Eigen::Index k = p.dim();
  const Mat t = p.at(e.lambda);
  CxeDecomposition out;
  out.g_basis = w_complement_basis(std::vector<Vec>{e.x, x_e}, p.W(), cfg);
  const Mat s = sigma_matrix(p, t, out.g_basis, e.x, x_e);
  const Vec target = p.C() * x_e;
  Vec coords;
  try {
    coords = solve(s, target, cfg);
  } catch (const NumericError&) {
    throw NumericError(ErrorCode::SplittingDegenerate, "columns T(G_*), T x_e, C x* are dependent");
  }
  out.y_star = coords.head(k - 2);
  out.alpha = coords(k - 2);
  out.beta = coords(k - 1);
  out.residual = (s * coords - target).cwiseAbs().maxCoeff();
  if (!(out.residual <= 1e-9 * std::max(1.0, target.cwiseAbs().maxCoeff()))) {
    throw NumericError(ErrorCode::SplittingDegenerate,
                       "splitting residual " + std::to_string(out.residual) + " exceeds 1e-9");
  }
  return out;
}

MeridianDeterminant meridian_determinant(const Pencil& p, const Eigenpoint& e, const Vec& x_e, double theta,
                                         const LinopsConfig& cfg) {
  const CxeDecomposition dec = decompose_Cxe(p, e, x_e, cfg);
  const Eigen::Index k = p.dim();
  const Mat t = p.at(e.lambda);
  const double st = std::sin(theta);
  const double ct = std::cos(theta);

  // d(Psi o eta) at (0, theta, lambda*): columns for y, theta and lambda.
  Mat d(k, k);
  for (std::size_t j = 0; j < dec.g_basis.size(); ++j) d.col(static_cast<Eigen::Index>(j)) = t * dec.g_basis[j];
  d.col(k - 2) = t * (ct * e.x - st * x_e);
  d.col(k - 1) = -(p.C() * (st * e.x + ct * x_e));

  const Mat s = sigma_matrix(p, t, dec.g_basis, e.x, x_e);
  MeridianDeterminant out;
  try {
    out.matrix = solve(s, d, cfg);
  } catch (const NumericError&) {
    throw NumericError(ErrorCode::SplittingDegenerate, "sigma isomorphism is singular");
  }
  out.assembled = det_sign_log(out.matrix, cfg);
  out.formula_value = st * (st + dec.beta * ct);

  const Eigen::Index n1 = k - 2;
  Mat expected_lead = Mat::Zero(k, k - 1);
  expected_lead.topLeftCorner(n1, n1).setIdentity();
  expected_lead(k - 2, k - 2) = -st;
  out.structure_defect = (out.matrix.leftCols(k - 1) - expected_lead).cwiseAbs().maxCoeff();

  BlockTriangular blocks{out.matrix.topRightCorner(n1, 2), out.matrix.bottomRightCorner(2, 2)};
  out.block = det_block_triangular(blocks, cfg);
  return out;
}

Vec default_equator(const Pencil& p, const Vec& x_star, const LinopsConfig& cfg) {
  return w_complement_basis(x_star, p.W(), cfg).front();
}

int eigenpoint_sign(const Pencil& p, const Eigenpoint& e, const LinopsConfig& cfg) {
  const Eigen::Index k = p.dim();
  const std::vector<Vec> b = w_complement_basis(e.x, p.W(), cfg);
  const Mat t = p.at(e.lambda);

  // d(Psi)_p(lambda', x') = T x' - lambda' C x on R x x^perp.
  Mat dpsi(k, k);
  dpsi.col(0) = -(p.C() * e.x);
  Mat frame(k, k);
  frame.col(0) = e.x;
  for (std::size_t j = 0; j < b.size(); ++j) {
    dpsi.col(static_cast<Eigen::Index>(j) + 1) = t * b[j];
    frame.col(static_cast<Eigen::Index>(j) + 1) = b[j];
  }
  const int s = det_sign_log(dpsi, cfg).sign;
  if (s == 0) throw NumericError(ErrorCode::NotSimple, "d(Psi) is singular at the eigenpoint");
  // (b_1..b_{k-1}) is positive in x^perp iff (x, b_1, ..., b_{k-1}) is positive in R^k.
  return s * det_sign_log(frame, cfg).sign;
}

EigenpointDegree eigenpoint_degree(const Pencil& p, const Eigenpoint& e, const Vec& x_e, const LinopsConfig& cfg) {
  EigenpointDegree out;
  out.sign = eigenpoint_sign(p, e, cfg);
  out.twin_direct = eigenpoint_sign(p, e.twin(), cfg);
  if (p.dim() >= 2) {
    constexpr double half_pi = std::numbers::pi / 2;
    const MeridianDeterminant north = meridian_determinant(p, e, x_e, half_pi, cfg);
    const MeridianDeterminant south = meridian_determinant(p, e, x_e, -half_pi, cfg);
    // The meridian family is block triangular, so its canonical orientation
    // has sign equal to sign det at every latitude.
    const int at_north = sign_oriented(OrientedOp::canonical(north.matrix, cfg), cfg);
    const int at_south = sign_oriented(OrientedOp::canonical(south.matrix, cfg), cfg);
    if (at_north == 0 || at_south == 0) {
      throw NumericError(ErrorCode::NotSimple, "meridian differential singular at a pole");
    }
    out.twin_transported = out.sign * at_north * at_south;
  }
  return out;
}

}  // namespace twinpoint
