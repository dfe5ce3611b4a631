#pragma once

#include <iosfwd>
#include <string>

#include "vlab/config.hpp"

namespace vlab {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_numerical = 3 };

/// Runs one experiment, writing manifest.json and its CSVs into out_dir.
/// Errors are reported on `err` and mapped to exit codes.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err);

/// Library version (git describe at configure time).
const char* version();

}  // namespace vlab
