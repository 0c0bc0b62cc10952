#pragma once

#include <string>

#include "rmlab/config.hpp"

namespace rmlab {

inline constexpr const char* kVersion = "0.1.0";

enum class ExitStatus : int {
    Ok = 0,
    InvalidConfig = 2,
    Underpowered = 3,
    NumericFailure = 4,
};

struct RunResult {
    ExitStatus status = ExitStatus::Ok;
    bool all_passed = false;
    std::string summary_path;
    std::string curve_path;
};

/// Runs the experiment and writes curve.csv, summary.json and run.log under
/// the output directory (RMLAB_OUTPUT_DIR overrides config.output_dir).
/// Rerunning an identical config reproduces curve.csv byte for byte.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace rmlab
