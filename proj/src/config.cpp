#include "twinpoint/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "twinpoint/errors.hpp"
#include "twinpoint/io.hpp"

namespace twinpoint {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError("key '" + key + "': integer out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem", [](RunConfig& c, auto&, auto& v) { c.problem = v; }},
      {"modes", [](RunConfig& c, auto& k, auto& v) { c.disc.modes = to_int(k, v); }},
      {"quad_points", [](RunConfig& c, auto& k, auto& v) { c.disc.quad_points = to_int(k, v); }},
      {"l", [](RunConfig& c, auto& k, auto& v) { c.l = to_double(k, v); }},
      {"c", [](RunConfig& c, auto& k, auto& v) { c.c = to_double(k, v); }},
      {"n_plus", [](RunConfig& c, auto& k, auto& v) { c.n_plus = to_double(k, v); }},
      {"n_minus", [](RunConfig& c, auto& k, auto& v) { c.n_minus = to_double(k, v); }},
      {"g", [](RunConfig& c, auto&, auto& v) { c.g = v; }},
      {"pencil_file", [](RunConfig& c, auto&, auto& v) { c.pencil_file = v; }},
      {"lo", [](RunConfig& c, auto& k, auto& v) { c.lo = to_double(k, v); }},
      {"hi", [](RunConfig& c, auto& k, auto& v) { c.hi = to_double(k, v); }},
      {"grid_n", [](RunConfig& c, auto& k, auto& v) { c.grid_n = to_int(k, v); }},
      {"rank_tol", [](RunConfig& c, auto& k, auto& v) { c.lin.rank_tol = to_double(k, v); }},
      {"full_pivoting", [](RunConfig& c, auto& k, auto& v) { c.lin.full_pivoting = to_bool(k, v); }},
      {"h0", [](RunConfig& c, auto& k, auto& v) { c.cont.h0 = to_double(k, v); }},
      {"h_min", [](RunConfig& c, auto& k, auto& v) { c.cont.h_min = to_double(k, v); }},
      {"h_max", [](RunConfig& c, auto& k, auto& v) { c.cont.h_max = to_double(k, v); }},
      {"newton_tol", [](RunConfig& c, auto& k, auto& v) { c.cont.newton_tol = to_double(k, v); }},
      {"newton_max", [](RunConfig& c, auto& k, auto& v) { c.cont.newton_max = to_int(k, v); }},
      {"r_max", [](RunConfig& c, auto& k, auto& v) { c.cont.r_max = to_double(k, v); }},
      {"max_steps", [](RunConfig& c, auto& k, auto& v) { c.cont.max_steps = to_int(k, v); }},
      {"trivial_tol", [](RunConfig& c, auto& k, auto& v) { c.cont.trivial_tol = to_double(k, v); }},
      {"loop_tol", [](RunConfig& c, auto& k, auto& v) { c.cont.loop_tol = to_double(k, v); }},
      {"min_turn_cos", [](RunConfig& c, auto& k, auto& v) { c.cont.min_turn_cos = to_double(k, v); }},
      {"stop_at_trivial", [](RunConfig& c, auto& k, auto& v) { c.cont.stop_at_trivial = to_bool(k, v); }},
      {"twins", [](RunConfig& c, auto& k, auto& v) { c.twins = to_bool(k, v); }},
      {"seed_lambdas", [](RunConfig& c, auto& k, auto& v) { c.seed_lambdas = to_list(k, v); }},
      {"winding_samples", [](RunConfig& c, auto& k, auto& v) { c.winding_samples = to_int(k, v); }},
      {"seed",
       [](RunConfig& c, auto& k, auto& v) {
         const long long x = to_integer(k, v);
         if (x < 0) throw ConfigError("key 'seed' must be >= 0");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
      {"fault_injection", [](RunConfig& c, auto&, auto& v) { c.fault_injection = v; }},
      {"convergence_base_modes", [](RunConfig& c, auto& k, auto& v) { c.convergence_base_modes = to_int(k, v); }},
  };
  return table;
}

}  // namespace

void validate(const RunConfig& cfg) {
  static const char* problems[] = {"example1", "example2", "example3", "air_resistance", "pencil"};
  if (std::find(std::begin(problems), std::end(problems), cfg.problem) == std::end(problems)) {
    throw ConfigError("unknown problem '" + cfg.problem + "'");
  }
  if (cfg.g != "vabsv" && cfg.g != "cubic" && cfg.g != "linear") throw ConfigError("unknown g '" + cfg.g + "'");
  if (cfg.problem == "pencil" && cfg.pencil_file.empty()) throw ConfigError("problem = pencil needs pencil_file");
  if (cfg.disc.modes < 2 || cfg.disc.modes > 512) throw ConfigError("modes must lie in [2, 512]");
  if (cfg.disc.quad_points < 0) throw ConfigError("quad_points must be >= 0");
  if (!(cfg.lo < cfg.hi)) throw ConfigError("need lo < hi");
  if (cfg.grid_n < 2 || cfg.grid_n > 10000000) throw ConfigError("grid_n must lie in [2, 1e7]");
  if (!(cfg.lin.rank_tol >= 0.0 && cfg.lin.rank_tol < 1e-2)) throw ConfigError("rank_tol must lie in [0, 1e-2)");
  if (cfg.winding_samples < 4) throw ConfigError("winding_samples must be >= 4");
  if (cfg.fault_injection != "none" && cfg.fault_injection != "twin_sign_flip") {
    throw ConfigError("unknown fault_injection '" + cfg.fault_injection + "'");
  }
  if (cfg.convergence_base_modes < 2) throw ConfigError("convergence_base_modes must be >= 2");
  if (!(cfg.cont.min_turn_cos > -1.0 && cfg.cont.min_turn_cos < 1.0)) {
    throw ConfigError("min_turn_cos must lie in (-1, 1)");
  }
  cfg.cont.validate();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ProblemSpec build_problem(const RunConfig& cfg) {
  if (cfg.problem == "example1") return build_example1(cfg.l, cfg.c, cfg.n_plus, cfg.n_minus);
  if (cfg.problem == "example2") return build_example2(cfg.disc);
  if (cfg.problem == "example3") return build_example3(cfg.disc);
  if (cfg.problem == "air_resistance") {
    if (cfg.g == "cubic") {
      return build_air_resistance(cfg.disc, [](double v) { return v * v * v; }, [](double v) { return 3.0 * v * v; });
    }
    if (cfg.g == "linear") {
      return build_air_resistance(cfg.disc, [](double v) { return v; }, [](double) { return 1.0; });
    }
    return build_air_resistance(cfg.disc);
  }
  std::ifstream in(cfg.pencil_file);
  if (!in) throw ConfigError("cannot open pencil file " + cfg.pencil_file);
  Pencil p = read_pencil(in);
  const Eigen::Index k = p.dim();
  return ProblemSpec{
      std::move(p),
      [k](const Vec&) -> Vec { return Vec::Zero(k); },
      [k](const Vec&) -> Mat { return Mat::Zero(k, k); },
      [](const Vec&, double) -> PointValue { throw NumericError(ErrorCode::InvalidArgument, "a bare pencil has no point evaluation"); },
      "pencil",
      {},
  };
}

}  // namespace twinpoint
