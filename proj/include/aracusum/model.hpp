#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace aracusum {

using Count = std::int64_t;

/// Parameters of the K-stream binomial surveillance model.
///
/// Before the change every region produces Bin(c, p) positives out of c
/// tests. After `change_time` the regions in `hotspots` switch to Bin(c, q).
/// Region indices are zero-based throughout the library.
struct ModelParams {
    std::size_t num_regions = 1;
    double in_control_rate = 0.01;       // p
    double out_of_control_rate = 0.05;   // q
    Count budget = 1;                    // C, total tests per day
    double threshold = 0.0;              // alarm level h
    std::vector<std::size_t> hotspots;   // H
    std::optional<std::size_t> change_time;  // t0; nullopt means the change never happens

    /// Throws DomainError unless 0 < p < q < 1, K >= 1, C >= 1 and every
    /// hotspot index is below K.
    void validate() const;

    bool is_hotspot(std::size_t region) const;
    /// Rate generating day-`t` observations of `region` (days are 1-based).
    double rate_at(std::size_t region, std::size_t t) const;
};

/// One day of data: tests administered and positives observed per region.
struct ObservationBatch {
    std::size_t time = 0;
    std::vector<Count> tests;
    std::vector<Count> positives;

    /// Throws DimensionError / DomainError on inconsistent lengths or
    /// positives exceeding tests.
    void validate(std::size_t num_regions) const;
};

struct CusumState {
    std::vector<double> stats;  // W_k, may be negative right after an update
    std::size_t time = 0;

    static CusumState zeros(std::size_t num_regions) {
        return {std::vector<double>(num_regions, 0.0), 0};
    }
};

struct AlarmReport {
    bool fired = false;
    std::optional<std::size_t> region;
};

/// Log-likelihood ratio ln[Bin(c,q)(x) / Bin(c,p)(x)] in closed form:
/// c ln((1-q)/(1-p)) + x ln(q(1-p) / (p(1-q))).
double llr_increment(Count tests, Count positives, double p, double q);

/// W'_k = max(W_k, 0) + llr_increment(c_k, X_k, p, q).
CusumState cusum_step(const CusumState& state, const ObservationBatch& batch,
                      const ModelParams& params);

/// In-place form used on the simulation hot path. `tests` and `positives`
/// must have the same length as `stats`.
void cusum_step_inplace(std::span<double> stats, std::span<const Count> tests,
                        std::span<const Count> positives, double p, double q);

/// Fires iff max_k W_k > threshold; the alarmed region is the lowest index
/// attaining the maximum.
AlarmReport check_alarm(const CusumState& state, double threshold);
AlarmReport check_alarm(std::span<const double> stats, double threshold);

}  // namespace aracusum
