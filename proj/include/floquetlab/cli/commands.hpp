#pragma once

// Subcommand drivers behind the floquetlab executable. Each run validates the
// whole configuration first (ConfigError, ResourceGuardError), then computes,
// gathers results by key and formats them on a single thread.

#include <cstddef>
#include <string>
#include <vector>

#include "floquetlab/cli/output.hpp"
#include "floquetlab/cli/run_config.hpp"

namespace floquetlab::cli {

// Sweeps above this many cells are refused.
inline constexpr double kMaxCells = 1e7;

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitResource = 4,
};

const std::vector<std::string>& subcommands();

// Keys accepted by a subcommand, with their defaults as config text.
const std::vector<std::pair<std::string, std::string>>& subcommand_keys(const std::string& name);

// Throws ConfigError or ResourceGuardError; computes nothing.
void validate(const RunConfig& config);

// Validates, then runs. The artifacts are CSV (or JSON) tables plus any JSON
// sidecars; their bytes do not depend on `threads`.
std::vector<Artifact> run_command(const RunConfig& config, std::size_t threads);

// Maps an in-flight exception onto the exit code table.
int exit_code_for_current_exception(std::string& message);

}  // namespace floquetlab::cli
