#pragma once

#include <string>
#include <vector>

#include "krein/app/config.hpp"
#include "krein/app/output.hpp"
#include "krein/spectral.hpp"

namespace krein::app {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
    std::string out_dir;         // overrides output.dir and KREIN_OUTPUT_DIR
    bool deterministic = false;  // omit the run block (timestamp, wall time)
    bool quiet = false;          // no document on stdout
};

struct RunResult {
    int exit_code = 0;  // 0 success, 1 config error, 2 solver error
    Json document;
    std::vector<std::string> files;
};

const std::vector<std::string>& command_names();

// Executes one subcommand and writes <dir>/<name>.json plus any CSV series.
RunResult run_command(const std::string& command, const Config& config, const RunOptions& options);

ProblemPtr build_problem(const Config& config);

}  // namespace krein::app
