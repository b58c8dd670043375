#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "aracusum/allocators.hpp"
#include "aracusum/model.hpp"
#include "aracusum/posterior.hpp"

namespace aracusum {

/// Daily empirical infection rates, one column per region.
struct RateMatrix {
    std::vector<std::string> region_names;
    std::vector<std::string> dates;         // ISO-8601, contiguous days
    std::vector<std::vector<double>> rates;  // rates[t][k] in [0, 1]

    std::size_t num_days() const { return rates.size(); }
    std::size_t num_regions() const { return region_names.size(); }
};

/// Reads `date,<region_1>,...,<region_K>` CSV. Throws DataError naming the
/// 1-based data row and region column of the first problem found.
RateMatrix load_rate_matrix(const std::filesystem::path& path);
RateMatrix parse_rate_matrix(std::istream& in);

struct ReplayOptions {
    /// Use X = round(c * rate) instead of binomial draws.
    bool deterministic = false;
};

struct ReplayReport {
    bool alarmed = false;
    std::optional<std::size_t> alarm_day;  // 1-based day index
    std::optional<std::string> alarm_date;
    std::optional<std::size_t> alarmed_region;
    std::optional<std::string> alarmed_region_name;
    std::size_t days_monitored = 0;
    /// One row per monitored day (up to and including the alarm day).
    std::vector<std::vector<double>> cusum_trace;
    std::vector<std::vector<Count>> allocation_trace;
};

/// Runs the monitoring loop over the matrix, observing
/// X_k ~ Bin(c_k, rate[t][k]) each day, until the first alarm or the end of
/// the data. Rates q and p of `model` only enter the CUSUM statistic.
ReplayReport replay(const RateMatrix& matrix, const ModelParams& model, const AllocatorPolicy& policy,
                    const PriorConfig& prior, std::uint64_t seed, const ReplayOptions& options = {});

}  // namespace aracusum
