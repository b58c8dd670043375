#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aracusum/allocators.hpp"
#include "aracusum/simulation.hpp"

namespace aracusum {

enum class OutputFormat { Csv, Json };

enum class ThresholdMode {
    Fixed,  // model.threshold is a number
    Auto,   // calibrate every sweep combination before simulating
    File,   // look up a calibrate command's threshold.json
};

/// One combination of the swept parameters.
struct SweepPoint {
    AllocatorPolicy policy;
    double q = 0.0;
    double decay = 1.0;
    double a = 1.0;
    double b = 1.0;
};

/// Validated command-line configuration. Sweepable fields (policy kind, q,
/// decay, prior a) accept a scalar or a list; `sweep()` expands the
/// Cartesian product in the order policy, decay, a, q.
struct CliConfig {
    SimulationConfig sim;  // scalar fields; swept fields hold the first value

    std::vector<AllocatorPolicy> policies;
    std::vector<double> q_values;
    std::vector<double> decay_values;
    std::vector<double> a_values;
    std::optional<double> prior_b;     // fixed b, or
    std::optional<double> prior_mean;  // b derived as a (1 - mean) / mean

    ThresholdMode threshold_mode = ThresholdMode::Fixed;
    std::filesystem::path threshold_file;

    std::size_t ic_days = 500;
    std::size_t oc_days = 500;

    std::filesystem::path replay_data;
    bool replay_deterministic = false;
    std::size_t replay_seed_count = 1;

    std::vector<std::string> region_names;

    std::filesystem::path output_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    int verbosity = 0;

    std::vector<SweepPoint> sweep() const;
    /// Simulation config specialised to one sweep point.
    SimulationConfig at(const SweepPoint& point) const;
};

/// Parses a JSON config file.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Applies a `dotted.path=value` override. The value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Validates every field and builds the typed configuration. Throws
/// ConfigError whose message starts with the offending field path.
CliConfig parse_config(const nlohmann::json& doc);

}  // namespace aracusum
