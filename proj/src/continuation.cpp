#include "twinpoint/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twinpoint/errors.hpp"

namespace twinpoint {

Vec State::packed() const {
  Vec u(c.size() + 2);
  u(0) = s;
  u(1) = lambda;
  u.tail(c.size()) = c;
  return u;
}

State State::unpack(const Vec& u) { return {u(0), u(1), u.tail(u.size() - 2)}; }

void ContinuationConfig::validate() const {
  if (!(0 < h_min && h_min <= h0 && h0 <= h_max)) {
    throw ConfigError("continuation steps must satisfy 0 < h_min <= h0 <= h_max");
  }
  if (!(newton_tol > 0 && trivial_tol > 0 && loop_tol > 0 && r_max > 0)) {
    throw ConfigError("continuation tolerances and r_max must be positive");
  }
  if (newton_max < 1 || max_steps < 1) throw ConfigError("newton_max and max_steps must be >= 1");
}

std::string termination_name(const Termination& t) {
  struct Visitor {
    std::string operator()(const termination::Unbounded&) const { return "Unbounded"; }
    std::string operator()(const termination::TrivialEncounter&) const { return "TrivialEncounter"; }
    std::string operator()(const termination::ClosedLoop&) const { return "ClosedLoop"; }
    std::string operator()(const termination::MaxSteps&) const { return "MaxSteps"; }
    std::string operator()(const termination::CorrectorFailure&) const { return "CorrectorFailure"; }
  };
  return std::visit(Visitor{}, t);
}

Vec residual(const ProblemSpec& ps, const State& u) {
  const Pencil& p = ps.pencil;
  const Eigen::Index k = p.dim();
  Vec r(k + 1);
  r.head(k) = p.L() * u.c + u.s * ps.n_eval(u.c) - u.lambda * (p.C() * u.c);
  r(k) = p.W().inner(u.c, u.c) - 1.0;
  return r;
}

Mat jacobian(const ProblemSpec& ps, const State& u) {
  const Pencil& p = ps.pencil;
  const Eigen::Index k = p.dim();
  Mat j = Mat::Zero(k + 1, k + 2);
  j.block(0, 0, k, 1) = ps.n_eval(u.c);
  j.block(0, 1, k, 1) = -(p.C() * u.c);
  j.block(0, 2, k, k) = p.L() + u.s * ps.dn_eval(u.c) - u.lambda * p.C();
  j.block(k, 2, 1, k) = 2.0 * (p.W().matrix() * u.c).transpose();
  return j;
}

namespace {

std::optional<Vec> bordered_null_vector(const Mat& j, const Vec& row) {
  const Eigen::Index n = j.cols();
  Mat a(n, n);
  a.topRows(n - 1) = j;
  a.row(n - 1) = row.transpose();
  if (det_sign_log(a).sign == 0) return std::nullopt;
  Vec rhs = Vec::Zero(n);
  rhs(n - 1) = 1.0;
  Vec t = Eigen::PartialPivLU<Mat>(a).solve(rhs);
  if (!t.allFinite() || t.norm() == 0.0) return std::nullopt;
  return t;
}

}  // namespace

Vec tangent(const ProblemSpec& ps, const State& u, const std::optional<Vec>& prev) {
  const Mat j = jacobian(ps, u);
  const Eigen::Index n = j.cols();
  std::vector<Vec> rows;
  if (prev) rows.push_back(*prev);
  // Deterministic re-seeding order: s, lambda, then each coefficient.
  for (Eigen::Index i = 0; i < n; ++i) rows.push_back(Vec::Unit(n, i));
  for (const Vec& row : rows) {
    if (auto t = bordered_null_vector(j, row)) {
      Vec unit = *t / t->norm();
      if (prev && unit.dot(*prev) < 0) unit = -unit;
      return unit;
    }
  }
  throw NumericError(ErrorCode::RankDeficient, "bordered tangent system singular for every border row");
}

std::optional<Correction> newton_correct(const ProblemSpec& ps, const State& predicted, const Vec& t,
                                         const ContinuationConfig& cfg) {
  Vec u = predicted.packed();
  const Eigen::Index n = u.size();
  for (int it = 0; it <= cfg.newton_max; ++it) {
    const State cur = State::unpack(u);
    const Vec r = residual(ps, cur);
    if (!r.allFinite()) return std::nullopt;
    if (r.cwiseAbs().maxCoeff() <= cfg.newton_tol) return Correction{cur, it};
    if (it == cfg.newton_max) break;
    Mat a(n, n);
    a.topRows(n - 1) = jacobian(ps, cur);
    a.row(n - 1) = t.transpose();
    if (det_sign_log(a).sign == 0) return std::nullopt;
    Vec rhs = Vec::Zero(n);
    rhs.head(n - 1) = -r;
    u += Eigen::PartialPivLU<Mat>(a).solve(rhs);
  }
  return std::nullopt;
}

std::optional<State> correct_fixed_s(const ProblemSpec& ps, const State& guess, const ContinuationConfig& cfg) {
  State cur = guess;
  const Eigen::Index k = ps.pencil.dim();
  for (int it = 0; it <= cfg.newton_max; ++it) {
    const Vec r = residual(ps, cur);
    if (!r.allFinite()) return std::nullopt;
    if (r.cwiseAbs().maxCoeff() <= cfg.newton_tol) return cur;
    if (it == cfg.newton_max) break;
    const Mat a = jacobian(ps, cur).rightCols(k + 1);
    if (det_sign_log(a).sign == 0) return std::nullopt;
    const Vec delta = Eigen::PartialPivLU<Mat>(a).solve(Vec(-r));
    cur.lambda += delta(0);
    cur.c += delta.tail(k);
  }
  return std::nullopt;
}

double state_norm(const ProblemSpec& ps, const State& u) {
  return std::max({std::abs(u.s), std::abs(u.lambda), ps.pencil.W().norm(u.c)});
}

SeedScan find_trivial_seeds(const ProblemSpec& ps, double lo, double hi, int grid_n, const ScanConfig& scan) {
  const Pencil& p = ps.pencil;
  SeedScan out;
  for (double lambda : scan_eigenvalues(p, lo, hi, grid_n, scan).eigenvalues) {
    const SimplicityReport rep = check_simple(p, lambda, scan);
    if (!rep.simple()) {
      out.non_simple.push_back(lambda);
      out.non_simple_kernel_dims.push_back(rep.kernel_dim);
      continue;
    }
    Eigenpoint e{lambda, *rep.x_star};
    out.seeds.push_back({e, e.twin()});
  }
  return out;
}

State seed_state(const Eigenpoint& e) { return {0.0, e.lambda, e.x}; }

namespace {

struct HalfResult {
  std::vector<BranchPoint> points;
  Termination termination;
  std::vector<TrivialSolution> encounters;
};

bool same_trivial(const ProblemSpec& ps, const TrivialSolution& a, const State& b, double tol) {
  return std::abs(a.lambda - b.lambda) <= tol && ps.pencil.W().norm(Vec(a.c - b.c)) <= tol;
}

HalfResult trace_half(const ProblemSpec& ps, const State& seed, const Vec& t0, const ContinuationConfig& cfg) {
  HalfResult half;
  const TrivialSolution seed_solution{seed.lambda, seed.c};
  const Vec seed_packed = seed.packed();
  State u = seed;
  Vec t = t0;
  double h = cfg.h0;
  int steps = 0;

  while (true) {
    if (steps >= cfg.max_steps) {
      half.termination = termination::MaxSteps{};
      return half;
    }
    const Vec before = u.packed();
    std::optional<Correction> corr = newton_correct(ps, State::unpack(Vec(before + h * t)), t, cfg);
    std::optional<Vec> t_new;
    if (corr) {
      try {
        t_new = tangent(ps, corr->state, t);
      } catch (const NumericError&) {
        t_new.reset();
      }
      const double moved = (corr->state.packed() - before).norm();
      if (!t_new || t_new->dot(t) < cfg.min_turn_cos || moved > 2.0 * h) corr.reset();
    }
    if (!corr) {
      h *= 0.5;
      if (h < cfg.h_min) {
        half.termination = termination::CorrectorFailure{steps};
        return half;
      }
      continue;
    }

    ++steps;
    const State next = corr->state;
    half.points.push_back({next, *t_new});
    if (corr->iterations <= 3) h = std::min(h * 1.3, cfg.h_max);

    if (state_norm(ps, next) > cfg.r_max) {
      half.termination = termination::Unbounded{};
      return half;
    }

    const bool crossed = (u.s < 0 && next.s >= 0) || (u.s > 0 && next.s <= 0);
    if (crossed) {
      const double frac = u.s / (u.s - next.s);
      State guess = State::unpack(Vec(before + frac * (next.packed() - before)));
      guess.s = 0.0;
      if (std::optional<State> hit = correct_fixed_s(ps, guess, cfg)) {
        if (same_trivial(ps, seed_solution, *hit, cfg.trivial_tol)) {
          if (steps >= 10) {
            half.termination = termination::ClosedLoop{};
            return half;
          }
        } else {
          const bool known = std::any_of(half.encounters.begin(), half.encounters.end(),
                                         [&](const TrivialSolution& e) { return same_trivial(ps, e, *hit, cfg.trivial_tol); });
          if (!known) {
            half.encounters.push_back({hit->lambda, hit->c});
            if (cfg.stop_at_trivial) {
              half.termination = termination::TrivialEncounter{hit->lambda};
              return half;
            }
          }
        }
      }
    }

    if (steps >= 10 && (next.packed() - seed_packed).norm() <= cfg.loop_tol && t_new->dot(t0) > 0) {
      half.termination = termination::ClosedLoop{};
      return half;
    }

    u = next;
    t = *t_new;
  }
}

template <class T>
bool holds(const Termination& t) {
  return std::holds_alternative<T>(t);
}

Termination combine(const Termination& fwd, const Termination& bwd, const std::vector<TrivialSolution>& enc) {
  using namespace termination;
  if (holds<ClosedLoop>(fwd) || holds<ClosedLoop>(bwd)) return ClosedLoop{};
  if (holds<Unbounded>(fwd) || holds<Unbounded>(bwd)) return Unbounded{};
  if (holds<TrivialEncounter>(fwd)) return fwd;
  if (holds<TrivialEncounter>(bwd)) return bwd;
  if (enc.size() > 1) return TrivialEncounter{enc[1].lambda};
  if (holds<CorrectorFailure>(fwd)) return fwd;
  if (holds<CorrectorFailure>(bwd)) return bwd;
  return MaxSteps{};
}

}  // namespace

Branch trace_branch(const ProblemSpec& ps, const State& seed_in, const ContinuationConfig& cfg) {
  cfg.validate();
  if (seed_in.s != 0.0) throw NumericError(ErrorCode::InvalidArgument, "trace_branch seeds must have s = 0");
  State seed = seed_in;
  if (residual(ps, seed).cwiseAbs().maxCoeff() > cfg.newton_tol) {
    std::optional<State> polished = correct_fixed_s(ps, seed, cfg);
    if (!polished) throw NumericError(ErrorCode::InvalidArgument, "seed is not a trivial solution");
    seed = *polished;
  }

  const Vec t0 = tangent(ps, seed);
  HalfResult fwd = trace_half(ps, seed, t0, cfg);
  HalfResult bwd;
  if (holds<termination::ClosedLoop>(fwd.termination)) {
    bwd.termination = termination::ClosedLoop{};
  } else {
    bwd = trace_half(ps, seed, Vec(-t0), cfg);
  }

  Branch br;
  br.seed = seed;
  br.halves = {fwd.termination, bwd.termination};
  br.trivial_encounters.push_back({seed.lambda, seed.c});
  for (auto& e : fwd.encounters) br.trivial_encounters.push_back(std::move(e));
  for (auto& e : bwd.encounters) br.trivial_encounters.push_back(std::move(e));

  br.points.reserve(fwd.points.size() + bwd.points.size() + 1);
  for (auto it = bwd.points.rbegin(); it != bwd.points.rend(); ++it) {
    br.points.push_back({it->state, Vec(-it->tangent)});
  }
  br.seed_index = br.points.size();
  br.points.push_back({seed, t0});
  for (auto& pt : fwd.points) br.points.push_back(std::move(pt));
  br.termination = combine(fwd.termination, bwd.termination, br.trivial_encounters);
  return br;
}

int component_degree_sum(const ProblemSpec& ps, const Branch& branch, const ScanConfig& scan) {
  if (!holds<termination::ClosedLoop>(branch.termination)) {
    throw NumericError(ErrorCode::InvalidArgument, "component_degree_sum needs a closed branch");
  }
  int total = 0;
  for (const TrivialSolution& enc : branch.trivial_encounters) {
    const SimplicityReport rep = check_simple(ps.pencil, enc.lambda, scan);
    if (!rep.simple()) {
      throw NumericError(ErrorCode::NonSimpleEncounter,
                         "trivial encounter at lambda = " + std::to_string(enc.lambda) + " is not simple");
    }
    const Vec x = enc.c / ps.pencil.W().norm(enc.c);
    total += eigenpoint_sign(ps.pencil, Eigenpoint{enc.lambda, x}, scan.lin);
  }
  return total;
}

std::optional<State> locate_s(const ProblemSpec& ps, const Branch& branch, double s_target,
                              const ContinuationConfig& cfg) {
  const auto& pts = branch.points;
  auto try_pair = [&](std::size_t a, std::size_t b) -> std::optional<State> {
    const State& u = pts[a].state;
    const State& v = pts[b].state;
    const double du = u.s - s_target;
    const double dv = v.s - s_target;
    if (du * dv > 0 || u.s == v.s) return std::nullopt;
    const double frac = du / (du - dv);
    State guess = State::unpack(Vec(u.packed() + frac * (v.packed() - u.packed())));
    guess.s = s_target;
    return correct_fixed_s(ps, guess, cfg);
  };
  for (std::size_t i = branch.seed_index; i + 1 < pts.size(); ++i) {
    if (auto hit = try_pair(i, i + 1)) return hit;
  }
  for (std::size_t i = branch.seed_index; i > 0; --i) {
    if (auto hit = try_pair(i - 1, i)) return hit;
  }
  return std::nullopt;
}

}  // namespace twinpoint
