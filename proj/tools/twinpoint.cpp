#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>

#include "twinpoint/cli.hpp"
#include "twinpoint/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Degree calculus and branch tracing for L x + s N(x) = lambda C x on the W-unit sphere"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  app.add_option("--config", config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config key 'out')");
  app.add_option("--seed", seed, "PRNG seed for the randomized suites (overrides the config key 'seed')")
      ->check(CLI::NonNegativeNumber);
  const std::pair<const char*, const char*> commands[] = {
      {"scan", "locate eigenvalues of L - lambda C in [lo, hi] and test simplicity"},
      {"degree", "eigenpoint signs, twin signs and characteristic sign jumps"},
      {"trace", "continue branches from simple trivial solutions and classify them"},
      {"winding", "winding numbers at the seeds of a scalar Dirichlet problem"},
      {"verify", "run the acceptance suite"},
      {"plot", "redraw branches.svg from a previous trace"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : twinpoint::kExitConfig;
  }

  twinpoint::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = twinpoint::load_config(config_path);
  } catch (const twinpoint::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return twinpoint::kExitConfig;
  }
  if (!out_dir.empty()) cfg.out = out_dir;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  return twinpoint::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
