#pragma once

// Subcommands of the dicke tool. Each returns its report and output files
// instead of writing them, so the same code serves single runs and sweeps.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "run_config.hpp"

namespace dicke::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitInvariant = 4,
};

const char* version();

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  /// File name (relative to the output directory) and contents.
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
};

CommandResult run_compile(const RunConfig& config);
CommandResult run_simulate(const RunConfig& config);
CommandResult run_budget(const RunConfig& config);
CommandResult run_validate(const RunConfig& config);
CommandResult run_cavity(const RunConfig& config);
/// Runs every sweep point on `jobs` workers; point outputs land in
/// out_dir/point_NNNN as soon as each point finishes.
CommandResult run_sweep(const RunConfig& config, const std::filesystem::path& out_dir, int jobs);

/// Runs `command` and maps library exceptions to exit codes; the error text
/// ends up in the summary and in report["error"].
CommandResult run_guarded(const std::string& command, const RunConfig& config, const std::filesystem::path& out_dir,
                          int jobs);

/// Writes through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
void write_outputs(const std::filesystem::path& out_dir, const CommandResult& result);

/// Milliseconds with three significant figures, e.g. "0.289 ms".
std::string format_duration(double seconds);

/// Pretty-printed JSON with shortest round-trip numbers and a trailing newline.
std::string dump(const nlohmann::json& doc);

}  // namespace dicke::cli
