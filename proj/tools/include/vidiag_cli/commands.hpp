#ifndef VIDIAG_CLI_COMMANDS_HPP
#define VIDIAG_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "vidiag_cli/run_config.hpp"

namespace vidiag::cli {

/// Exit status and the report that was written (null when none was).
struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

/// PSIS diagnostic on a draws file (cfg.input) or on a fresh VI fit of
/// cfg.model. Writes report.json and, if requested, weights.csv. Exit 2
/// when the category is Bad.
CommandResult cmd_psis(const RunConfig& cfg, std::ostream& log);

/// VSBC on cfg.model. Writes report.json, pvals.csv and hist_<margin>.csv.
/// Exit 3 when too many replications fail.
CommandResult cmd_vsbc(const RunConfig& cfg, std::ostream& log);

/// VI fit of cfg.model. Writes q.csv, trace.csv and fit.json. Exit 3 on
/// divergence, with the trace up to that point kept.
CommandResult cmd_fit(const RunConfig& cfg, std::ostream& log);

/// Desk-scale experiment bundle under cfg.out/<demo>.
CommandResult cmd_demo(const RunConfig& cfg, std::ostream& log);

std::vector<std::string> demo_names();

/// Validates cfg, runs the command and maps errors to exit codes.
/// Messages go to err.
int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace vidiag::cli

#endif
