#pragma once

#include <ostream>

#include "aracusum/config.hpp"

namespace aracusum {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitCalibration = 3,
    kExitData = 4,
};

/// Each command writes its files into `config.output_dir` (created when
/// missing) and reports progress on `log` according to the verbosity.
/// Errors are thrown as ConfigError, CalibrationError or DataError.

/// threshold.json: calibrated threshold of the first sweep point plus a
/// `calibrations` list covering every point.
void cmd_calibrate(const CliConfig& config, std::ostream& log);

/// metrics.csv / metrics.json: one row per sweep point with ARL1, DP, SDRL.
void cmd_simulate(const CliConfig& config, std::ostream& log);

/// behavior_in_control.csv, behavior_out_of_control.csv and
/// allocation_trace.csv (or behavior.json).
void cmd_behavior(const CliConfig& config, std::ostream& log);

/// replay_summary.json, cusum_trace.csv and allocation_trace.csv.
void cmd_replay(const CliConfig& config, std::ostream& log);

/// Maps an exception thrown by a command to its exit code.
int exit_code_for(const std::exception& error);

}  // namespace aracusum
