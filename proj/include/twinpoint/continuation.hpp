#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twinpoint/linops.hpp"
#include "twinpoint/pencil.hpp"
#include "twinpoint/problems.hpp"

namespace twinpoint {

/// A point (s, lambda, c) of R x R x R^k.
struct State {
  double s = 0.0;
  double lambda = 0.0;
  Vec c;

  Vec packed() const;
  static State unpack(const Vec& u);
};

struct ContinuationConfig {
  double h0 = 1e-2;
  double h_min = 1e-6;
  double h_max = 0.1;
  double newton_tol = 1e-9;
  int newton_max = 12;
  double r_max = 10.0;
  int max_steps = 20000;
  double trivial_tol = 1e-6;
  double loop_tol = 1e-6;
  /// Stop a half-branch at the first trivial solution different from the seed.
  bool stop_at_trivial = false;
  /// Steps whose tangent turns by more than acos(min_turn_cos) are rejected.
  double min_turn_cos = 0.8;

  void validate() const;
};

namespace termination {
struct Unbounded {};
struct TrivialEncounter {
  double lambda_found = 0.0;
};
struct ClosedLoop {};
struct MaxSteps {};
struct CorrectorFailure {
  int step = 0;
};
}  // namespace termination

using Termination = std::variant<termination::Unbounded, termination::TrivialEncounter, termination::ClosedLoop,
                                 termination::MaxSteps, termination::CorrectorFailure>;

std::string termination_name(const Termination& t);

struct BranchPoint {
  State state;
  Vec tangent;  ///< Euclidean unit vector in R^{k+2}
};

struct TrivialSolution {
  double lambda = 0.0;
  Vec c;
};

/// One traced connected piece of the solution set. Points run from the end of
/// the backward half through the seed to the end of the forward half.
struct Branch {
  std::vector<BranchPoint> points;
  State seed;
  std::size_t seed_index = 0;
  Termination termination;
  /// Terminations of the forward and backward halves.
  std::array<Termination, 2> halves;
  /// Seed first, then every other s = 0 crossing in tracing order.
  std::vector<TrivialSolution> trivial_encounters;
};

/// [L c + s N(c) - lambda C c ; <c,c>_W - 1]
Vec residual(const ProblemSpec& ps, const State& u);

/// (k+1) x (k+2) derivative of the residual in (s, lambda, c).
Mat jacobian(const ProblemSpec& ps, const State& u);

/// Unit null vector of the Jacobian, oriented so that <t, prev> > 0.
Vec tangent(const ProblemSpec& ps, const State& u, const std::optional<Vec>& prev = std::nullopt);

struct Correction {
  State state;
  int iterations = 0;
};

/// Newton on [J; t^T] delta = [-residual; 0]. Empty on failure.
std::optional<Correction> newton_correct(const ProblemSpec& ps, const State& predicted, const Vec& t,
                                         const ContinuationConfig& cfg);

/// Newton in (lambda, c) with s held at guess.s.
std::optional<State> correct_fixed_s(const ProblemSpec& ps, const State& guess, const ContinuationConfig& cfg);

/// max(|s|, |lambda|, ||c||_W)
double state_norm(const ProblemSpec& ps, const State& u);

struct TrivialSeed {
  Eigenpoint point;
  Eigenpoint twin;
};

struct SeedScan {
  std::vector<TrivialSeed> seeds;
  /// Eigenvalues with kernel dimension > 1 or a non-transversal kernel.
  std::vector<double> non_simple;
  std::vector<int> non_simple_kernel_dims;
};

SeedScan find_trivial_seeds(const ProblemSpec& ps, double lo, double hi, int grid_n = 1000,
                            const ScanConfig& scan = {});

State seed_state(const Eigenpoint& e);

Branch trace_branch(const ProblemSpec& ps, const State& seed, const ContinuationConfig& cfg = {});

/// Sum of eigenpoint signs over the trivial encounters of a closed branch.
int component_degree_sum(const ProblemSpec& ps, const Branch& branch, const ScanConfig& scan = {});

/// Solution on the branch at s = s_target nearest to the seed along the
/// forward half (then the backward half).
std::optional<State> locate_s(const ProblemSpec& ps, const Branch& branch, double s_target,
                              const ContinuationConfig& cfg = {});

}  // namespace twinpoint
