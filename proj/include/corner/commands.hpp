#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corner/config.hpp"
#include "corner/io.hpp"

namespace corner {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumeric = 3,  ///< bracket or escape failure, nothing useful produced
    kExitPartial = 4,  ///< some tasks failed; what succeeded was written
};

struct CommandOptions {
    std::size_t workers = 0;  ///< 0 defers to the config, then to the hardware
    bool plot = false;
    std::optional<std::filesystem::path> out_dir;  ///< overrides config.output_dir
    std::optional<std::uint64_t> seed;             ///< overrides config.seed
};

struct CommandResult {
    int exit_code = kExitOk;
    RunManifest manifest;
    /// Deterministic summary (also written as summary.json).
    std::string summary;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its artifacts, summary.json and
/// manifest.json into the output directory. Config problems throw
/// ConfigError; numeric failures are reported through the exit code.
CommandResult run_command(std::string_view name, ExperimentConfig config, const CommandOptions& options);

}  // namespace corner
