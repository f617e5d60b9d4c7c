#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plaque/config.hpp"

namespace plaque {

struct CommandResult {
  std::vector<std::string> files;  // data files, each with a <file>.meta.json sidecar
  bool partial = false;            // a run stopped early; outputs are flagged
  nlohmann::json summary;          // the command's main report
};

std::vector<std::string> command_names();

/// Runs one subcommand and writes its files into `out_dir` (created if
/// missing). Throws plaque::Error on invalid input or failed runs.
CommandResult run_command(std::string_view name, const RunConfig& cfg,
                          const std::filesystem::path& out_dir);

/// Dimensional coefficients behind the configuration: the [dimensional]
/// block, or the dimensional preset adjusted to the configured theta and xi.
/// Throws PreconditionError when the dimensionless block differs from the
/// preset in any other coefficient.
DimensionalParams dimensional_for(const RunConfig& cfg);

/// Error report written by the command line front end.
nlohmann::json error_json(std::string_view kind, std::string_view message,
                          std::string_view command);

}  // namespace plaque
