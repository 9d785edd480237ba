#pragma once

#include <optional>
#include <vector>

#include "twinpoint/linops.hpp"

namespace twinpoint {

/// Linear eigenvalue problem L x = lambda C x on R^k with domain metric W.
class Pencil {
 public:
  /// Throws InvalidArgument when L - lambda C is singular at every sampled lambda.
  Pencil(Mat l, Mat c, GramMetric w, const LinopsConfig& cfg = {});

  const Mat& L() const { return l_; }
  const Mat& C() const { return c_; }
  const GramMetric& W() const { return w_; }
  Eigen::Index dim() const { return l_.rows(); }

  Mat at(double lambda) const { return l_ - lambda * c_; }

 private:
  Mat l_;
  Mat c_;
  GramMetric w_;
};

/// (lambda, x) with x W-unit and L x = lambda C x.
struct Eigenpoint {
  double lambda = 0.0;
  Vec x;

  Eigenpoint twin() const { return {lambda, -x}; }
};

bool is_eigenpoint(const Pencil& p, const Eigenpoint& e, double tol = 1e-8);

struct SimplicityReport {
  int kernel_dim = 0;
  bool transversal = false;
  std::optional<Vec> x_star;

  bool simple() const { return kernel_dim == 1 && transversal; }
};

struct ScanConfig {
  double tau_bisect = 1e-11;
  double tau_dedup = 1e-8;
  /// A grid minimum of log|det| lying dip_depth below the nearby peaks on both
  /// sides is probed for an even-multiplicity crossing.
  double dip_depth = 1.0;
  /// Relative singular-value tolerance for kernel detection.
  double kernel_tol = 1e-8;
  LinopsConfig lin{};
};

struct ScanResult {
  std::vector<double> eigenvalues;
  /// Two detected eigenvalues share a grid cell: rerun with a finer grid.
  bool grid_too_coarse = false;
};

SignLog delta(const Pencil& p, double lambda, const LinopsConfig& cfg = {});

ScanResult scan_eigenvalues(const Pencil& p, double lo, double hi, int grid_n, const ScanConfig& cfg = {});

/// Kernel dimension and transversality (C x* not in Im T) at lambda_star.
/// x_star is W-normalized with its largest-magnitude entry positive.
SimplicityReport check_simple(const Pencil& p, double lambda_star, const ScanConfig& cfg = {});

/// (sign delta(lambda*-eps) - sign delta(lambda*+eps)) / 2.
int sign_jump(const Pencil& p, double lambda_star, double eps, const LinopsConfig& cfg = {});

/// Half the distance from eigenvalues[i] to its nearest neighbour, capped at 1e-2.
double default_jump_epsilon(const std::vector<double>& eigenvalues, std::size_t i);

/// Coordinates of C x_e in the splitting H = T(G_*) + R T x_e + R C x_*.
struct CxeDecomposition {
  Vec y_star;                 ///< coordinates on g_basis
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<Vec> g_basis;   ///< W-orthonormal basis of G_* = x*^perp cap x_e^perp
  double residual = 0.0;
};

CxeDecomposition decompose_Cxe(const Pencil& p, const Eigenpoint& e, const Vec& x_e,
                               const LinopsConfig& cfg = {});

struct MeridianDeterminant {
  SignLog assembled;        ///< det of the numerically assembled differential
  SignLog block;            ///< det of its trailing 2x2 block
  double formula_value = 0; ///< sin t (sin t + beta cos t)
  double structure_defect = 0; ///< deviation of the leading blocks from [I 0; 0 -sin t]
  Mat matrix;               ///< the assembled differential in sigma-coordinates
};

/// Differential of the chart-composed map along the meridian through x* and
/// x_e, expressed in the sigma-coordinates (y, theta, lambda).
MeridianDeterminant meridian_determinant(const Pencil& p, const Eigenpoint& e, const Vec& x_e, double theta,
                                         const LinopsConfig& cfg = {});

/// Default equator point: first vector of the W-complement of x*.
Vec default_equator(const Pencil& p, const Vec& x_star, const LinopsConfig& cfg = {});

/// Sign of d(Psi)_p for the orientation induced by the standard orientations
/// of R x R^k (cylinder oriented by the outward normal) and R^k.
int eigenpoint_sign(const Pencil& p, const Eigenpoint& e, const LinopsConfig& cfg = {});

struct EigenpointDegree {
  int sign = 0;
  int twin_direct = 0;
  /// Twin sign obtained by transporting along the meridian; empty for k = 1.
  std::optional<int> twin_transported;
};

EigenpointDegree eigenpoint_degree(const Pencil& p, const Eigenpoint& e, const Vec& x_e,
                                   const LinopsConfig& cfg = {});

}  // namespace twinpoint
