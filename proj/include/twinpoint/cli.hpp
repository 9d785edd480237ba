#pragma once

#include <iosfwd>
#include <string>

#include "twinpoint/config.hpp"

namespace twinpoint {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2, kExitAcceptance = 3 };

/// Each command prints a JSON report to `out`, writes its files under
/// cfg.out and returns an exit code. Exceptions propagate.
int cmd_scan(const RunConfig& cfg, std::ostream& out);
int cmd_degree(const RunConfig& cfg, std::ostream& out);
int cmd_trace(const RunConfig& cfg, std::ostream& out);
int cmd_winding(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
/// Redraws branches.svg from summary.json and the branch CSVs in cfg.out.
int cmd_plot(const RunConfig& cfg, std::ostream& out);

/// Dispatches by name and maps ConfigError to 1 and NumericError to 2,
/// printing the message to `err`.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace twinpoint
