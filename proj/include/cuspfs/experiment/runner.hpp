#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace cuspfs::experiment {

/// Process exit status of a run.
enum ExitCode : int { kAllPass = 0, kCheckFailed = 1, kConfigFailure = 2, kNumericalFailure = 3 };

struct RunOptions {
    std::string command;
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;  ///< falls back to the config's "out"
    std::optional<std::uint64_t> seed;
};

/**
 * Load, execute and report one config.
 *
 * Config and domain errors leave no outputs. Numerical failures write
 * diagnostic.txt into the output directory.
 */
int run(const RunOptions& options, std::ostream& log);

/// "id  description" lines sorted by id.
void list_checks(std::ostream& os);

/// Applies CUSPFS_THREADS to the worker cap when set.
void apply_thread_env();

}  // namespace cuspfs::experiment
