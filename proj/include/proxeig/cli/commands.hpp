#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace proxeig::cli {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  /// Overrides every "seed" key of the config.
  std::optional<std::uint64_t> seed;
  /// When false, wall_ms is written as 0 so reruns are byte-identical.
  bool record_timing = true;
};

/// prox-power, graph-eig, net-modes, kernel, robustness.
const std::vector<std::string>& command_names();

/// Runs one command. Errors are reported on err as a JSON object
/// {"error": kind, "message": text} (plus "failed_runs" for sweeps with
/// failing members). Returns the process exit status: 0 on success, 1 on
/// failure.
int run_command(const std::string& name, const nlohmann::json& config,
                const RunOptions& opts, std::ostream& err);

}  // namespace proxeig::cli
