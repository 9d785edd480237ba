#include "twinpoint/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "twinpoint/continuation.hpp"
#include "twinpoint/errors.hpp"
#include "twinpoint/orientation.hpp"
#include "twinpoint/problems.hpp"
#include "twinpoint/winding.hpp"

namespace twinpoint {

namespace {

constexpr double kPi = std::numbers::pi;

Mat gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  Mat a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = nd(rng);
  return a;
}

Vec gaussian(std::mt19937_64& rng, Eigen::Index n) { return gaussian(rng, n, 1).col(0); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::mt19937_64 make_rng(const VerifyOptions& opt, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

CriterionResult result(int id, const char* name, bool passed, std::string detail) {
  while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
  return {id, name, passed, detail};
}

/// First simple eigenpoint of p in [-5, 5], if any.
std::vector<Eigenpoint> simple_eigenpoints(const Pencil& p) {
  std::vector<Eigenpoint> out;
  const ScanResult scan = scan_eigenvalues(p, -5.0, 5.0, 2000);
  for (double lambda : scan.eigenvalues) {
    const SimplicityReport rep = check_simple(p, lambda);
    if (rep.simple()) out.push_back({lambda, *rep.x_star});
  }
  return out;
}

int sgn(double x) { return (x > 0) - (x < 0); }

double worst_residual(const ProblemSpec& ps, const Branch& br) {
  double worst = 0.0;
  for (const auto& pt : br.points) worst = std::max(worst, residual(ps, pt.state).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

Pencil random_pencil(std::mt19937_64& rng, int k) {
  const Mat a = gaussian(rng, k, k);
  Mat w = a.transpose() * a + Mat::Identity(k, k);
  w = 0.5 * (w + w.transpose()).eval();
  return Pencil(gaussian(rng, k, k), gaussian(rng, k, k), GramMetric(w));
}

CriterionResult check_twin_theorem(const VerifyOptions& opt) {
  auto rng = make_rng(opt, 1);
  int eigenpoints = 0;
  int failures = 0;
  std::string first_failure;
  for (int trial = 0; trial < 200; ++trial) {
    const Pencil p = random_pencil(rng, uniform_int(rng, 2, 8));
    for (const Eigenpoint& e : simple_eigenpoints(p)) {
      ++eigenpoints;
      const EigenpointDegree d = eigenpoint_degree(p, e, default_equator(p, e.x));
      int transported = d.twin_transported.value_or(0);
      if (opt.flip_twin_sign) transported = -transported;
      if (std::abs(d.sign) != 1 || transported != d.sign || d.twin_direct != d.sign) {
        if (failures++ == 0) {
          std::ostringstream os;
          os << "trial " << trial << " lambda " << e.lambda << ": sign " << d.sign << ", transported twin "
             << transported << ", direct twin " << d.twin_direct;
          first_failure = os.str();
        }
      }
    }
  }
  std::ostringstream os;
  os << eigenpoints << " simple eigenpoints over 200 pencils, " << failures << " twin mismatches";
  if (failures) os << "; first: " << first_failure;
  return result(1, "twin eigenpoints share their sign", failures == 0 && eigenpoints > 0, os.str());
}

CriterionResult check_meridian_formula(const VerifyOptions& opt) {
  auto rng = make_rng(opt, 2);
  int pencils = 0;
  int samples = 0;
  int sign_fail = 0;
  double worst_rel = 0.0;
  while (pencils < 50) {
    const Pencil p = random_pencil(rng, uniform_int(rng, 2, 8));
    const std::vector<Eigenpoint> eps = simple_eigenpoints(p);
    if (eps.empty()) continue;
    ++pencils;
    const Eigenpoint& e = eps.front();
    for (int rep = 0; rep < 3; ++rep) {
      Vec x_e = gaussian(rng, p.dim());
      x_e -= p.W().inner(x_e, e.x) * e.x;
      x_e /= p.W().norm(x_e);
      for (int j = 0; j < 21; ++j) {
        const double theta = -kPi + (j + 0.25) * 2.0 * kPi / 21.0;
        const MeridianDeterminant md = meridian_determinant(p, e, x_e, theta);
        ++samples;
        if (md.assembled.sign != sgn(md.formula_value)) ++sign_fail;
        const double mag = std::exp(md.assembled.logabs);
        worst_rel = std::max(worst_rel, std::abs(mag - std::abs(md.formula_value)) / std::abs(md.formula_value));
      }
    }
  }
  std::ostringstream os;
  os << samples << " samples, " << sign_fail << " sign mismatches, worst relative magnitude error " << worst_rel;
  return result(2, "meridian determinant closed form", sign_fail == 0 && worst_rel <= 1e-8, os.str());
}

CriterionResult check_orientation_calculus(const VerifyOptions& opt) {
  auto rng = make_rng(opt, 3);
  std::ostringstream os;
  bool ok = true;

  // Four determinants of the Remark, formed explicitly as an independent check.
  int four_fail = 0;
  for (int i = 0; i < 500; ++i) {
    Mat t = gaussian(rng, 4, 4);
    if (i % 2) t = gaussian(rng, 4, 2) * gaussian(rng, 2, 4);
    const Mat a = t + gaussian(rng, 4, 4);
    const Mat b = t + gaussian(rng, 4, 4);
    const int expected = equivalent_companions(t, a - t, b - t) ? 1 : -1;
    const Mat ai = a.inverse();
    const Mat bi = b.inverse();
    for (const Mat& m : {Mat(bi * a), Mat(a * bi), Mat(ai * b), Mat(b * ai)}) {
      if (sgn(m.determinant()) != expected) ++four_fail;
    }
  }
  os << "four-determinant mismatches " << four_fail;
  ok = ok && four_fail == 0;

  // Two-class partition of companions of a fixed singular operator.
  const Mat t = gaussian(rng, 4, 2) * gaussian(rng, 2, 4);
  std::vector<Mat> reps;
  int ambiguous = 0;
  for (int i = 0; i < 500; ++i) {
    const Mat k = gaussian(rng, 4, 4);
    int matches = 0;
    for (const Mat& r : reps) matches += equivalent_companions(t, k, r);
    if (matches == 0) reps.push_back(k);
    if (matches > 1) ++ambiguous;
  }
  os << "; companion classes " << reps.size() << " (ambiguous " << ambiguous << ")";
  ok = ok && reps.size() == 2 && ambiguous == 0;

  int mult_fail = 0;
  for (int i = 0; i < 500; ++i) {
    auto random_op = [&] {
      Mat op = gaussian(rng, 5, 5);
      if (uniform_int(rng, 0, 4) == 0) op = gaussian(rng, 5, 4) * gaussian(rng, 4, 5);
      Mat k = gaussian(rng, 5, 5);
      return OrientedOp(std::move(op), std::move(k));
    };
    const OrientedOp first = random_op();
    const OrientedOp second = random_op();
    const int composite = sign_oriented(oriented_composition(first, second));
    if (composite != sign_oriented(first) * sign_oriented(second)) ++mult_fail;
  }
  os << "; multiplicativity failures " << mult_fail;
  ok = ok && mult_fail == 0;

  int block_fail = 0;
  for (int i = 0; i < 500; ++i) {
    const int d1 = uniform_int(rng, 1, 6);
    const int d2 = uniform_int(rng, 1, 4);
    const BlockTriangular b{gaussian(rng, d1, d2), gaussian(rng, d2, d2)};
    const SignLog blk = det_block_triangular(b);
    const SignLog full = det_sign_log(b.assemble());
    if (blk.sign != full.sign || std::abs(blk.logabs - full.logabs) > 1e-8) ++block_fail;
  }
  os << "; block determinant failures " << block_fail;
  ok = ok && block_fail == 0;
  return result(3, "orientation calculus", ok, os.str());
}

CriterionResult check_example2_spectrum(const VerifyOptions&) {
  const int m = 32;
  const ProblemSpec ps = build_example2({m, 0});
  const double top = (m / 2) * (m / 2);
  const ScanResult scan = scan_eigenvalues(ps.pencil, 0.5, top + 0.5, 4000);
  double worst = 0.0;
  bool ok = scan.eigenvalues.size() == static_cast<std::size_t>(m / 2);
  for (std::size_t i = 0; ok && i < scan.eigenvalues.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    worst = std::max(worst, std::abs(scan.eigenvalues[i] - n * n));
  }
  std::ostringstream os;
  os << scan.eigenvalues.size() << " eigenvalues for n <= " << m / 2 << " at M = " << m << ", worst error " << worst;
  return result(4, "example 2 spectrum n^2", ok && worst <= 1e-9, os.str());
}

CriterionResult check_example2_branches(const VerifyOptions& opt) {
  const int base = opt.convergence_base_modes;
  if (base < 16) {
    std::ostringstream os;
    os << "insufficient modes: base M = " << base
       << " is below 16, where the discretized branch is not yet in its asymptotic convergence regime";
    return result(5, "example 2 branch convergence", false, os.str());
  }
  constexpr double frozen_threshold = 1e-5;
  std::ostringstream os;
  bool ok = true;
  for (int n : {1, 2}) {
    std::vector<double> errs;
    for (int m : {base, 2 * base, 4 * base}) {
      const ProblemSpec ps = build_example2({m, 0});
      const Eigenpoint e{static_cast<double>(n * n), sine_mode(m, n)};
      const Branch br = trace_branch(ps, seed_state(e));
      const std::optional<State> at = locate_s(ps, br, 0.5);
      if (!at) throw NumericError(ErrorCode::CorrectorFailure, "branch never reaches s = 0.5");
      errs.push_back(std::abs(at->lambda - (n * n + 0.25)));
    }
    os << "n=" << n << ": errors";
    for (double e : errs) os << ' ' << e;
    os << "; ";
    ok = ok && errs[0] >= 2.0 * errs[1] && errs[1] >= 2.0 * errs[2] && errs[2] <= frozen_threshold;
  }
  os << "finest-level threshold " << frozen_threshold;
  return result(5, "example 2 branch convergence", ok, os.str());
}

CriterionResult check_example3_circle(const VerifyOptions&) {
  const int m = 4;
  const ProblemSpec ps = build_example3({m, 0});
  const Branch br = trace_branch(ps, State{0.0, 1.0, example3_circle_state(m, kPi / 2)});
  double circle = 0.0;
  double shape = 0.0;
  for (const auto& pt : br.points) {
    const State& u = pt.state;
    circle = std::max(circle, std::abs(u.s * u.s + u.lambda * u.lambda - 1.0));
    const Vec ref = example3_circle_state(m, std::atan2(u.lambda, u.s));
    shape = std::max(shape, std::min((u.c - ref).cwiseAbs().maxCoeff(), (u.c + ref).cwiseAbs().maxCoeff()));
  }
  int at_plus = 0;
  int at_minus = 0;
  for (const auto& e : br.trivial_encounters) {
    at_plus += std::abs(e.lambda - 1.0) <= 1e-8;
    at_minus += std::abs(e.lambda + 1.0) <= 1e-8;
  }
  bool twins = br.trivial_encounters.size() == 4;
  for (std::size_t i = 0; twins && i < 4; ++i) {
    bool found = false;
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& a = br.trivial_encounters[i];
      const auto& b = br.trivial_encounters[j];
      found = found || (i != j && std::abs(a.lambda - b.lambda) <= 1e-8 && (a.c + b.c).cwiseAbs().maxCoeff() <= 1e-6);
    }
    twins = found;
  }
  const bool closed = std::holds_alternative<termination::ClosedLoop>(br.termination);
  const int degree = closed ? component_degree_sum(ps, br) : 99;
  std::ostringstream os;
  os << termination_name(br.termination) << ", " << br.points.size() << " points, circle error " << circle
     << ", state error " << shape << ", encounters " << br.trivial_encounters.size() << " (" << at_plus
     << " at 1, " << at_minus << " at -1), degree sum " << degree;
  const bool ok = closed && circle <= 1e-8 && shape <= 1e-6 && at_plus == 2 && at_minus == 2 && twins && degree == 0;
  return result(6, "example 3 circle component", ok, os.str());
}

CriterionResult check_example3_isolated(const VerifyOptions&) {
  const double expected[] = {std::sqrt(2.0), std::sqrt(5.0), std::sqrt(10.0), std::sqrt(17.0)};
  std::ostringstream os;
  bool ok = true;
  for (int m : {4, 8}) {
    const ProblemSpec ps = build_example3({m, 0});
    const ScanResult scan = scan_eigenvalues(ps.pencil, 1.01, 5.0, 1000);
    double worst = 0.0;
    const bool count = scan.eigenvalues.size() == 4;
    for (std::size_t i = 0; count && i < 4; ++i) worst = std::max(worst, std::abs(scan.eigenvalues[i] - expected[i]));
    os << "M=" << m << ": " << scan.eigenvalues.size() << " eigenvalues, worst error " << worst << "; ";
    ok = ok && count && worst <= 1e-8;
  }
  return result(7, "example 3 isolated eigenvalues", ok, os.str());
}

CriterionResult check_example1_lines(const VerifyOptions&) {
  const ProblemSpec ps = build_example1(2.0, 1.0, 1.0, 0.5);
  const SeedScan seeds = find_trivial_seeds(ps, 0.0, 4.0);
  if (seeds.seeds.size() != 1) {
    return result(8, "example 1 affine lines", false, "expected one simple eigenvalue, got " + std::to_string(seeds.seeds.size()));
  }
  double worst = 0.0;
  bool ok = true;
  std::ostringstream os;
  for (const Eigenpoint& e : {seeds.seeds[0].point, seeds.seeds[0].twin}) {
    const int side = e.x(0) > 0 ? 1 : -1;
    const AnalyticBranch& line = ps.analytic_branches[side > 0 ? 0 : 1];
    const Branch br = trace_branch(ps, seed_state(e));
    for (const auto& pt : br.points) {
      worst = std::max(worst, std::abs(pt.state.lambda - line.lambda(pt.state.s)));
      ok = ok && std::abs(pt.state.c(0) - side) <= 1e-10;
    }
    os << "x=" << side << ": " << termination_name(br.termination) << " after " << br.points.size() << " points; ";
  }
  os << "worst lambda error " << worst;
  return result(8, "example 1 affine lines", ok && worst <= 1e-10, os.str());
}

CriterionResult check_winding_numbers(const VerifyOptions&) {
  const int m = 64;
  const ProblemSpec ps = build_example2({m, 0});
  std::ostringstream os;
  int failures = 0;
  for (int n = 1; n <= 6; ++n) {
    const Vec x = sine_mode(m, n);
    for (double a : {1.0, 0.1, 10.0}) {
      failures += winding_number(ps, Vec(a * x)).value != n;
      failures += winding_number(ps, Vec(-a * x)).value != -n;
    }
  }
  os << "modes 1..6, signs +-, scales {1, 0.1, 10}: " << failures << " mismatches";
  return result(9, "winding numbers of pure modes", failures == 0, os.str());
}

CriterionResult check_air_resistance(const VerifyOptions&) {
  const ProblemSpec ps = build_air_resistance({32, 0});
  const SeedScan seeds = find_trivial_seeds(ps, 0.5, 10.0);
  std::ostringstream os;
  bool ok = seeds.seeds.size() == 3;
  for (const TrivialSeed& ts : seeds.seeds) {
    const int n = static_cast<int>(std::lround(std::sqrt(ts.point.lambda)));
    for (const Eigenpoint& e : {ts.point, ts.twin}) {
      const int expected = (e.x(n - 1) > 0 ? 1 : -1) * n;
      const Branch br = trace_branch(ps, seed_state(e));
      const BranchWinding bw = branch_winding(ps, br);
      const bool unbounded = std::holds_alternative<termination::Unbounded>(br.termination) &&
                             std::holds_alternative<termination::Unbounded>(br.halves[0]) &&
                             std::holds_alternative<termination::Unbounded>(br.halves[1]);
      const bool pass = unbounded && br.trivial_encounters.size() == 1 && bw.constant && bw.values.front() == expected;
      os << "(" << e.lambda << ", " << expected << "): " << termination_name(br.halves[0]) << "/"
         << termination_name(br.halves[1]) << ", encounters " << br.trivial_encounters.size() << ", winding "
         << (bw.constant ? "constant " : "varying ") << bw.values.front() << "; ";
      ok = ok && pass;
    }
  }
  return result(10, "air resistance branches unbounded", ok, os.str());
}

CriterionResult check_numerical_hygiene(const VerifyOptions& opt) {
  auto rng = make_rng(opt, 11);
  std::vector<ProblemSpec> problems = {build_example1(2.0, 1.0, 1.0, 0.5), build_example2({16, 0}),
                                       build_example3({4, 0}), build_air_resistance({16, 0})};
  std::ostringstream os;
  bool ok = true;
  for (const ProblemSpec& ps : problems) {
    const Eigen::Index k = ps.pencil.dim();
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Vec c = gaussian(rng, k);
      c /= ps.pencil.W().norm(c);
      c *= std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
      const Mat j = ps.dn_eval(c);
      const double h = 1e-6;
      Mat fd(k, k);
      for (Eigen::Index col = 0; col < k; ++col) {
        Vec up = c;
        Vec dn = c;
        up(col) += h;
        dn(col) -= h;
        fd.col(col) = (ps.n_eval(up) - ps.n_eval(dn)) / (2 * h);
      }
      worst = std::max(worst, (fd - j).cwiseAbs().maxCoeff() / std::max(1.0, j.cwiseAbs().maxCoeff()));
    }
    os << ps.label << " dN error " << worst << "; ";
    ok = ok && worst <= 1e-5;
  }

  std::vector<std::pair<const ProblemSpec*, State>> runs;
  const ProblemSpec ex1 = problems[0];
  const ProblemSpec ex2 = build_example2({32, 0});
  const ProblemSpec ex3 = problems[2];
  const ProblemSpec air = build_air_resistance({32, 0});
  runs.push_back({&ex1, State{0.0, 2.0, Vec::Constant(1, 1.0)}});
  runs.push_back({&ex1, State{0.0, 2.0, Vec::Constant(1, -1.0)}});
  for (int n = 1; n <= 3; ++n) {
    runs.push_back({&ex2, State{0.0, double(n * n), sine_mode(32, n)}});
    runs.push_back({&air, State{0.0, double(n * n), sine_mode(32, n)}});
    runs.push_back({&air, State{0.0, double(n * n), Vec(-sine_mode(32, n))}});
  }
  runs.push_back({&ex3, State{0.0, 1.0, example3_circle_state(4, kPi / 2)}});
  double worst = 0.0;
  std::size_t points = 0;
  int reversals = 0;
  for (const auto& [ps, seed] : runs) {
    const Branch br = trace_branch(*ps, seed);
    worst = std::max(worst, worst_residual(*ps, br));
    points += br.points.size();
    for (std::size_t i = 1; i < br.points.size(); ++i) reversals += br.points[i].tangent.dot(br.points[i - 1].tangent) <= 0;
  }
  os << points << " accepted points on " << runs.size() << " branches, worst residual " << worst
     << ", tangent reversals " << reversals;
  ok = ok && worst <= 1e-9 && reversals == 0;
  return result(11, "numerical hygiene", ok, os.str());
}

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = {
      {1, "twin eigenpoints share their sign", check_twin_theorem},
      {2, "meridian determinant closed form", check_meridian_formula},
      {3, "orientation calculus", check_orientation_calculus},
      {4, "example 2 spectrum n^2", check_example2_spectrum},
      {5, "example 2 branch convergence", check_example2_branches},
      {6, "example 3 circle component", check_example3_circle},
      {7, "example 3 isolated eigenvalues", check_example3_isolated},
      {8, "example 1 affine lines", check_example1_lines},
      {9, "winding numbers of pure modes", check_winding_numbers},
      {10, "air resistance branches unbounded", check_air_resistance},
      {11, "numerical hygiene", check_numerical_hygiene},
  };
  return all;
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt) {
  std::vector<CriterionResult> out;
  for (const Criterion& c : acceptance_criteria()) {
    try {
      out.push_back(c.run(opt));
    } catch (const std::exception& e) {
      out.push_back({c.id, c.name, false, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

}  // namespace twinpoint
