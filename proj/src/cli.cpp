#include "twinpoint/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <json.hpp>

#include "twinpoint/continuation.hpp"
#include "twinpoint/errors.hpp"
#include "twinpoint/io.hpp"
#include "twinpoint/verify.hpp"
#include "twinpoint/winding.hpp"

namespace twinpoint {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

void emit(const RunConfig& cfg, const std::string& file, const json& j, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  write_file(out_dir(cfg) / file, text);
  out << text;
}

ScanConfig scan_config(const RunConfig& cfg) {
  ScanConfig sc;
  sc.lin = cfg.lin;
  return sc;
}

json problem_json(const RunConfig& cfg, const ProblemSpec& ps) {
  json j{{"label", ps.label}, {"dim", ps.pencil.dim()}};
  if (cfg.problem == "example2" || cfg.problem == "example3" || cfg.problem == "air_resistance") {
    j["modes"] = cfg.disc.modes;
  }
  if (cfg.problem == "air_resistance") {
    j["quad_points"] = cfg.disc.effective_quad_points();
    j["g"] = cfg.g;
  }
  if (cfg.problem == "example1") j.update({{"l", cfg.l}, {"c", cfg.c}, {"n_plus", cfg.n_plus}, {"n_minus", cfg.n_minus}});
  return j;
}

bool wanted(const RunConfig& cfg, double lambda) {
  if (cfg.seed_lambdas.empty()) return true;
  return std::any_of(cfg.seed_lambdas.begin(), cfg.seed_lambdas.end(),
                     [&](double target) { return std::abs(target - lambda) <= 1e-6 * std::max(1.0, std::abs(target)); });
}

struct SeedChoice {
  Eigenpoint point;
  bool twin = false;
};

std::vector<SeedChoice> select_seeds(const RunConfig& cfg, const ProblemSpec& ps, SeedScan& scan) {
  scan = find_trivial_seeds(ps, cfg.lo, cfg.hi, cfg.grid_n, scan_config(cfg));
  std::vector<SeedChoice> out;
  for (const TrivialSeed& s : scan.seeds) {
    if (!wanted(cfg, s.point.lambda)) continue;
    out.push_back({s.point, false});
    if (cfg.twins) out.push_back({s.twin, true});
  }
  return out;
}

std::optional<int> encounter_sign(const RunConfig& cfg, const ProblemSpec& ps, const TrivialSolution& t) {
  const SimplicityReport rep = check_simple(ps.pencil, t.lambda, scan_config(cfg));
  if (!rep.simple()) return std::nullopt;
  return eigenpoint_sign(ps.pencil, Eigenpoint{t.lambda, t.c / ps.pencil.W().norm(t.c)}, cfg.lin);
}

PlotBranch plot_from(const std::vector<CsvRow>& rows, const json& branch) {
  PlotBranch pb;
  for (const CsvRow& r : rows) pb.path.emplace_back(r.s, r.lambda);
  for (const auto& e : branch.at("trivial_encounters")) pb.markers.emplace_back(0.0, e.at("lambda").get<double>());
  return pb;
}

}  // namespace

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec ps = build_problem(cfg);
  const ScanResult scan = scan_eigenvalues(ps.pencil, cfg.lo, cfg.hi, cfg.grid_n, scan_config(cfg));
  json eigs = json::array();
  for (std::size_t i = 0; i < scan.eigenvalues.size(); ++i) {
    const double lambda = scan.eigenvalues[i];
    const SimplicityReport rep = check_simple(ps.pencil, lambda, scan_config(cfg));
    json e{{"lambda", lambda}, {"kernel_dim", rep.kernel_dim}, {"simple", rep.simple()}};
    try {
      e["sign_jump"] = sign_jump(ps.pencil, lambda, default_jump_epsilon(scan.eigenvalues, i), cfg.lin);
    } catch (const NumericError&) {
      e["sign_jump"] = nullptr;
    }
    eigs.push_back(std::move(e));
  }
  json j{{"command", "scan"},
         {"problem", problem_json(cfg, ps)},
         {"window", {cfg.lo, cfg.hi}},
         {"grid_n", cfg.grid_n},
         {"grid_too_coarse", scan.grid_too_coarse},
         {"eigenvalues", std::move(eigs)}};
  emit(cfg, "scan.json", j, out);
  return kExitOk;
}

int cmd_degree(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec ps = build_problem(cfg);
  const Pencil& p = ps.pencil;
  const ScanResult scan = scan_eigenvalues(p, cfg.lo, cfg.hi, cfg.grid_n, scan_config(cfg));
  json rows = json::array();
  for (std::size_t i = 0; i < scan.eigenvalues.size(); ++i) {
    const double lambda = scan.eigenvalues[i];
    const SimplicityReport rep = check_simple(p, lambda, scan_config(cfg));
    json row{{"lambda", lambda}, {"kernel_dim", rep.kernel_dim}, {"simple", rep.simple()}};
    if (rep.simple()) {
      const Eigenpoint e{lambda, *rep.x_star};
      if (p.dim() >= 2) {
        const Vec x_e = default_equator(p, e.x, cfg.lin);
        const EigenpointDegree d = eigenpoint_degree(p, e, x_e, cfg.lin);
        row["sign"] = d.sign;
        row["twin_direct"] = d.twin_direct;
        row["twin_transported"] = *d.twin_transported;
        row["beta"] = decompose_Cxe(p, e, x_e, cfg.lin).beta;
      } else {
        row["sign"] = eigenpoint_sign(p, e, cfg.lin);
        row["twin_direct"] = eigenpoint_sign(p, e.twin(), cfg.lin);
        row["twin_transported"] = nullptr;
      }
      row["sign_jump"] = sign_jump(p, lambda, default_jump_epsilon(scan.eigenvalues, i), cfg.lin);
    }
    rows.push_back(std::move(row));
  }
  json j{{"command", "degree"},
         {"problem", problem_json(cfg, ps)},
         {"window", {cfg.lo, cfg.hi}},
         {"orientation", "R x x-perp oriented by the outward normal; sign = sign det[-Cx | T b] * sign det[x | b]"},
         {"eigenpoints", std::move(rows)}};
  emit(cfg, "degree.json", j, out);
  return kExitOk;
}

int cmd_trace(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec ps = build_problem(cfg);
  SeedScan scan;
  const std::vector<SeedChoice> seeds = select_seeds(cfg, ps, scan);

  std::vector<std::future<Branch>> jobs;
  for (const SeedChoice& s : seeds) {
    jobs.push_back(std::async(std::launch::async, [&ps, &cfg, s] { return trace_branch(ps, seed_state(s.point), cfg.cont); }));
  }
  std::vector<Branch> traced;
  for (auto& j : jobs) traced.push_back(j.get());

  const fs::path dir = out_dir(cfg);
  json branches = json::array();
  json skipped = json::array();
  std::vector<const Branch*> kept;
  std::vector<PlotBranch> plot;
  for (std::size_t i = 0; i < traced.size(); ++i) {
    const Branch& br = traced[i];
    const SeedChoice& seed = seeds[i];
    // A seed already met by an earlier branch lies on the same component.
    const Branch* owner = nullptr;
    for (const Branch* k : kept) {
      for (const auto& e : k->trivial_encounters) {
        if (std::abs(e.lambda - br.seed.lambda) <= cfg.cont.trivial_tol &&
            ps.pencil.W().norm(Vec(e.c - br.seed.c)) <= cfg.cont.trivial_tol) {
          owner = k;
        }
      }
    }
    if (owner) {
      skipped.push_back({{"seed_lambda", seed.point.lambda}, {"seed", seed.twin ? "-x*" : "+x*"}});
      continue;
    }
    kept.push_back(&br);
    const std::size_t index = kept.size() - 1;

    json enc = json::array();
    for (const auto& t : br.trivial_encounters) {
      const std::optional<int> sign = encounter_sign(cfg, ps, t);
      enc.push_back({{"lambda", t.lambda}, {"eigenpoint_sign", sign ? json(*sign) : json(nullptr)}});
    }
    json b{{"index", index},
           {"seed_lambda", seed.point.lambda},
           {"seed", seed.twin ? "-x*" : "+x*"},
           {"termination", termination_name(br.termination)},
           {"forward", termination_name(br.halves[0])},
           {"backward", termination_name(br.halves[1])},
           {"points", br.points.size()},
           {"trivial_encounters", std::move(enc)}};
    if (const auto* te = std::get_if<termination::TrivialEncounter>(&br.termination)) b["lambda_found"] = te->lambda_found;
    b["degree_sum"] = nullptr;
    if (std::holds_alternative<termination::ClosedLoop>(br.termination)) {
      try {
        b["degree_sum"] = component_degree_sum(ps, br, scan_config(cfg));
      } catch (const NumericError& e) {
        b["degree_sum_error"] = e.what();
      }
    }

    std::optional<BranchWinding> wind;
    b["winding"] = nullptr;
    if (ps.scalar_dirichlet) {
      try {
        wind = branch_winding(ps, br, WindingConfig{cfg.winding_samples});
        b["winding"] = {{"constant", wind->constant}, {"value", wind->constant ? json(wind->values.front()) : json(nullptr)}};
      } catch (const NumericError& e) {
        b["winding_error"] = e.what();
      }
    }

    const std::string csv_name = "branch_" + std::to_string(index) + ".csv";
    std::ostringstream csv;
    write_branch_csv(csv, ps, br, wind ? &wind->values : nullptr);
    write_file(dir / csv_name, csv.str());
    b["csv"] = csv_name;

    PlotBranch pb;
    for (const auto& pt : br.points) pb.path.emplace_back(pt.state.s, pt.state.lambda);
    for (const auto& t : br.trivial_encounters) pb.markers.emplace_back(0.0, t.lambda);
    plot.push_back(std::move(pb));
    branches.push_back(std::move(b));
  }

  json non_simple = json::array();
  for (std::size_t i = 0; i < scan.non_simple.size(); ++i) {
    non_simple.push_back({{"lambda", scan.non_simple[i]}, {"kernel_dim", scan.non_simple_kernel_dims[i]}});
  }
  json j{{"command", "trace"},
         {"problem", problem_json(cfg, ps)},
         {"window", {cfg.lo, cfg.hi}},
         {"r_max", cfg.cont.r_max},
         {"note", "Unbounded means the branch left the ball max(|s|, |lambda|, ||c||_W) <= r_max; it is a numerical verdict at r_max"},
         {"branches", std::move(branches)},
         {"duplicate_seeds", std::move(skipped)},
         {"non_simple", std::move(non_simple)}};
  std::ostringstream svg;
  write_svg(svg, plot);
  write_file(dir / "branches.svg", svg.str());
  emit(cfg, "summary.json", j, out);
  return kExitOk;
}

int cmd_winding(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec ps = build_problem(cfg);
  if (!ps.scalar_dirichlet) {
    throw NumericError(ErrorCode::InvalidArgument, "the winding map is defined only for scalar Dirichlet problems");
  }
  SeedScan scan;
  json rows = json::array();
  for (const SeedChoice& s : select_seeds(cfg, ps, scan)) {
    const WindingResult w = winding_number(ps, s.point.x, WindingConfig{cfg.winding_samples});
    rows.push_back({{"lambda", s.point.lambda},
                    {"seed", s.twin ? "-x*" : "+x*"},
                    {"winding", w.value},
                    {"min_gap", w.min_gap},
                    {"max_arg_step", w.max_arg_step},
                    {"samples", w.samples_used}});
  }
  json j{{"command", "winding"}, {"problem", problem_json(cfg, ps)}, {"window", {cfg.lo, cfg.hi}}, {"eigenpoints", std::move(rows)}};
  emit(cfg, "winding.json", j, out);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.flip_twin_sign = cfg.fault_injection == "twin_sign_flip";
  opt.convergence_base_modes = cfg.convergence_base_modes;
  json rows = json::array();
  bool all = true;
  for (const CriterionResult& r : run_acceptance(opt)) {
    all = all && r.passed;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  json j{{"command", "verify"},
         {"seed", cfg.seed},
         {"fault_injection", cfg.fault_injection},
         {"convergence_base_modes", cfg.convergence_base_modes},
         {"passed", all},
         {"criteria", std::move(rows)}};
  emit(cfg, "verify.json", j, out);
  return all ? kExitOk : kExitAcceptance;
}

int cmd_plot(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir(cfg.out);
  std::ifstream summary_file(dir / "summary.json");
  if (!summary_file) throw ConfigError("no summary.json in " + cfg.out + "; run trace first");
  json summary;
  try {
    summary = json::parse(summary_file);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary.json: ") + e.what());
  }
  std::vector<PlotBranch> plot;
  for (const auto& b : summary.at("branches")) {
    std::ifstream csv(dir / b.at("csv").get<std::string>());
    if (!csv) throw ConfigError("missing " + b.at("csv").get<std::string>());
    plot.push_back(plot_from(read_branch_csv(csv), b));
  }
  std::ostringstream svg;
  write_svg(svg, plot);
  write_file(dir / "branches.svg", svg.str());
  json j{{"command", "plot"}, {"branches", plot.size()}, {"svg", (dir / "branches.svg").string()}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (name == "scan") return cmd_scan(cfg, out);
    if (name == "degree") return cmd_degree(cfg, out);
    if (name == "trace") return cmd_trace(cfg, out);
    if (name == "winding") return cmd_winding(cfg, out);
    if (name == "verify") return cmd_verify(cfg, out);
    if (name == "plot") return cmd_plot(cfg, out);
    throw ConfigError("unknown command '" + name + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace twinpoint
