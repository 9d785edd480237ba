#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "twinpoint/cli.hpp"
#include "twinpoint/errors.hpp"
#include "twinpoint/io.hpp"

using namespace twinpoint;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() / ("twinpoint_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("parse_config reads keys, comments and lists") {
  const RunConfig cfg = parse_config(
      "# comment\n"
      "problem = example3  \n"
      "\n"
      "modes=6\n"
      "lo = -1.5 # trailing\n"
      "hi = 1.5\n"
      "seed_lambdas = 1, -1\n"
      "stop_at_trivial = true\n"
      "h0 = 0.02\n");
  CHECK(cfg.problem == "example3");
  CHECK(cfg.disc.modes == 6);
  CHECK(cfg.lo == -1.5);
  CHECK(cfg.seed_lambdas == std::vector<double>{1.0, -1.0});
  CHECK(cfg.cont.stop_at_trivial);
  CHECK(cfg.cont.h0 == 0.02);
  CHECK(cfg.n_minus == 0.5);
}

TEST_CASE("parse_config rejects bad input") {
  CHECK_THROWS_WITH_AS(parse_config("modes = 4\nbogus = 1\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("modes = four\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("modes = 4.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("lo = 3\nhi = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = example9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("modes\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("twins = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("h0 = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("problem = pencil\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/twinpoint.conf"), ConfigError);
}

TEST_CASE("matrix and pencil text round-trip exactly") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> nd;
  Mat a(3, 4);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(rng) * std::pow(10.0, i - 5);
  std::stringstream ss;
  write_matrix(ss, a);
  CHECK(read_matrix(ss) == a);

  const ProblemSpec ex2 = build_example2({5, 0});
  std::stringstream ps;
  write_pencil(ps, ex2.pencil);
  const Pencil back = read_pencil(ps);
  CHECK(back.L() == ex2.pencil.L());
  CHECK(back.C() == ex2.pencil.C());

  std::stringstream bad("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_matrix(bad), ConfigError);
}

TEST_CASE("branch CSV round-trips") {
  const ProblemSpec ex3 = build_example3({4, 0});
  ContinuationConfig cfg;
  cfg.max_steps = 4;
  const Branch br = trace_branch(ex3, seed_state(find_trivial_seeds(ex3, 0.5, 1.5).seeds.at(0).point), cfg);
  std::vector<int> w(br.points.size(), 7);
  std::stringstream ss;
  write_branch_csv(ss, ex3, br, &w);
  const auto rows = read_branch_csv(ss);
  REQUIRE(rows.size() == br.points.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].s == br.points[i].state.s);
    CHECK(rows[i].lambda == br.points[i].state.lambda);
    CHECK(rows[i].winding == 7);
  }
  CHECK(rows.back().term == termination_name(br.halves[0]));
  CHECK(rows.front().term == termination_name(br.halves[1]));
}

TEST_CASE("scan reports the expected eigenvalues") {
  TempDir tmp("scan");
  RunConfig cfg;
  cfg.disc.modes = 32;
  cfg.out = tmp.path.string();
  std::ostringstream out;
  CHECK(cmd_scan(cfg, out) == kExitOk);
  const json j = read_json(tmp.path / "scan.json");
  CHECK(json::parse(out.str()) == j);
  REQUIRE(j["eigenvalues"].size() == 3);
  for (int n = 1; n <= 3; ++n) {
    const json& e = j["eigenvalues"][n - 1];
    CHECK(e["lambda"].get<double>() == doctest::Approx(n * n).epsilon(1e-10));
    CHECK(e["simple"].get<bool>());
    CHECK(e["sign_jump"].get<int>() != 0);
  }

  cfg.problem = "example3";
  cfg.disc.modes = 8;
  cfg.lo = 1.01;
  cfg.hi = 10.0;
  CHECK(cmd_scan(cfg, out) == kExitOk);
  const json iso = read_json(tmp.path / "scan.json");
  CHECK(iso["eigenvalues"].size() == 8);
  for (const auto& e : iso["eigenvalues"]) CHECK(e["kernel_dim"].get<int>() == 2);

  cfg.problem = "example2";
  cfg.lo = 1.5;
  cfg.hi = 3.5;
  CHECK(cmd_scan(cfg, out) == kExitOk);
  CHECK(read_json(tmp.path / "scan.json")["eigenvalues"].empty());
}

TEST_CASE("trace writes a closed example 3 component deterministically") {
  TempDir a("trace_a");
  TempDir b("trace_b");
  RunConfig cfg = parse_config("problem = example3\nmodes = 4\nlo = 0.5\nhi = 1.5\n");
  std::ostringstream out;
  cfg.out = a.path.string();
  CHECK(cmd_trace(cfg, out) == kExitOk);
  cfg.out = b.path.string();
  CHECK(cmd_trace(cfg, out) == kExitOk);

  const json s = read_json(a.path / "summary.json");
  REQUIRE(s["branches"].size() == 1);
  CHECK(s["duplicate_seeds"].size() == 1);
  const json& br = s["branches"][0];
  CHECK(br["termination"] == "ClosedLoop");
  CHECK(br["degree_sum"] == 0);
  CHECK(br["trivial_encounters"].size() == 4);

  for (const char* f : {"summary.json", "branch_0.csv", "branches.svg"}) {
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
  const std::string svg = slurp(a.path / "branches.svg");
  CHECK(count(svg, "<polyline") == 1);
  CHECK(count(svg, "class=\"trivial\"") == 4);

  fs::remove(a.path / "branches.svg");
  RunConfig replot = cfg;
  replot.out = a.path.string();
  CHECK(cmd_plot(replot, out) == kExitOk);
  CHECK(slurp(a.path / "branches.svg") == svg);
}

TEST_CASE("winding command on example 2") {
  TempDir tmp("winding");
  RunConfig cfg;
  cfg.disc.modes = 24;
  cfg.hi = 5.0;
  cfg.cont.r_max = 4.0;
  cfg.out = tmp.path.string();
  std::ostringstream out, err;
  CHECK(run_command("winding", cfg, out, err) == kExitOk);
  const json j = read_json(tmp.path / "winding.json");
  REQUIRE(j["eigenpoints"].size() == 4);
  for (const auto& e : j["eigenpoints"]) {
    const int n = static_cast<int>(std::lround(std::sqrt(e["lambda"].get<double>())));
    CHECK(e["winding"].get<int>() == (e["seed"] == "+x*" ? n : -n));
  }
}

TEST_CASE("run_command maps errors to exit codes") {
  TempDir tmp("exit");
  RunConfig cfg;
  cfg.out = tmp.path.string();
  std::ostringstream out, err;

  cfg.problem = "example3";
  cfg.disc.modes = 4;
  cfg.lo = 0.5;
  cfg.hi = 1.5;
  CHECK(run_command("winding", cfg, out, err) == kExitNumeric);
  CHECK(err.str().find("InvalidArgument") != std::string::npos);

  RunConfig missing;
  missing.problem = "pencil";
  missing.pencil_file = (tmp.path / "absent.txt").string();
  missing.out = cfg.out;
  CHECK(run_command("scan", missing, out, err) == kExitConfig);
  CHECK(run_command("nonsense", cfg, out, err) == kExitConfig);
}

TEST_CASE("fault injection fails verification") {
  TempDir tmp("verify");
  RunConfig cfg;
  cfg.out = tmp.path.string();
  cfg.fault_injection = "twin_sign_flip";
  std::ostringstream out, err;
  CHECK(run_command("verify", cfg, out, err) == kExitAcceptance);
  const json j = read_json(tmp.path / "verify.json");
  CHECK_FALSE(j["passed"].get<bool>());
  CHECK_FALSE(j["criteria"][0]["passed"].get<bool>());
}
