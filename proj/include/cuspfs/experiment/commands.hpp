#pragma once

#include <string>
#include <vector>

#include "cuspfs/experiment/config.hpp"
#include "cuspfs/experiment/report.hpp"

namespace cuspfs::experiment {

struct CheckInfo {
    std::string id;
    std::string command;
    std::string operation;  ///< the library operation the check exercises
    std::string description;
};

/// All shipped checks, sorted by id.
const std::vector<CheckInfo>& check_catalog();

/// Check ids produced by a command.
std::vector<std::string> command_checks(const std::string& command);

/// Throws ConfigError when a selected id is unknown or belongs to another command.
void validate_selection(const ExperimentConfig& config);

/// Run the configured command; independent checks run concurrently, results are sorted by id.
RunResult execute(const ExperimentConfig& config);

}  // namespace cuspfs::experiment
