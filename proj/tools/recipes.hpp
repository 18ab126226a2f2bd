#pragma once

#include <string>

#include "run_config.hpp"

namespace qpg::cli {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_wood = 3, exit_numerical = 4 };

struct RunOptions {
    std::string out_dir;  ///< overrides the config output
    int threads = 1;
    bool dump_matrix = false;
};

/// Exit status of a library error.
int exit_code_for(const Error& e);

/// Runs one recipe and writes its artifacts plus manifest.json into the output directory.
int run(const std::string& recipe, const RunConfig& config, const RunOptions& opt);

/// Manifest for a run that failed before the recipe started.
void write_failure_manifest(const std::string& dir, const std::string& recipe, const std::string& message, int code);

}  // namespace qpg::cli
