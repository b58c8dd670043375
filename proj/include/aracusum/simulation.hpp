#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aracusum/allocators.hpp"
#include "aracusum/model.hpp"
#include "aracusum/planner.hpp"
#include "aracusum/posterior.hpp"
#include "aracusum/random.hpp"

namespace aracusum {

/// State of one monitoring loop: today's allocation, the posterior, the CUSUM
/// statistics and the day counter.
///
/// Each day: feed the positives observed under `allocation()` to `observe`,
/// which updates posterior and CUSUM and reports the alarm status; then call
/// `plan_next` to compute tomorrow's allocation. Day one always uses the even
/// split.
class SurveillanceLoop {
public:
    SurveillanceLoop(const ModelParams& model, const PriorConfig& prior, const AllocatorPolicy& policy);

    AlarmReport observe(std::span<const Count> positives);
    void plan_next();

    const AllocationVector& allocation() const { return allocation_; }
    const PosteriorState& posterior() const { return posterior_; }
    const CusumState& cusum() const { return cusum_; }
    std::size_t day() const { return cusum_.time; }
    /// max_k W_k after the most recent observation.
    double max_stat() const;
    const ModelParams& model() const { return model_; }

private:
    ModelParams model_;
    PriorConfig prior_;
    AllocatorPolicy policy_;
    AllocationVector allocation_;
    PosteriorState posterior_;
    CusumState cusum_;
};

struct SimulationConfig {
    ModelParams model;
    AllocatorPolicy policy;
    PriorConfig prior;
    std::size_t replications = 1000;
    std::uint64_t base_seed = 20200123;
    std::size_t max_steps = 4000;
    double target_arl0 = 200.0;
    double arl_tolerance = 10.0;
    /// Binary-search bracket for threshold calibration.
    double h_lo = 0.0;
    double h_hi = 30.0;
    /// Worker threads; 0 means hardware concurrency. Never affects results.
    std::size_t threads = 0;
    bool record_allocations = false;

    void validate() const;
};

struct RunOutcome {
    std::size_t run_length = 0;
    bool truncated = false;
    std::optional<std::size_t> alarmed_region;
    std::vector<std::vector<Count>> allocation_trace;
};

struct MetricsReport {
    double arl = 0.0;
    double sdrl = 0.0;
    double detection_precision = 0.0;
    std::size_t replication_count = 0;
    std::size_t truncation_count = 0;
};

struct CalibrationResult {
    double threshold = 0.0;
    double achieved_arl0 = 0.0;
    std::size_t probes = 0;
};

/// Draws X_k ~ Bin(c_k, rate) for day `t` using the model's rate schedule.
ObservationBatch sample_observations(const AllocationVector& allocation, const ModelParams& model,
                                     std::size_t t, Rng& rng);

/// One replication of the full loop until the first alarm or `max_steps`.
RunOutcome run_once(const SimulationConfig& config, std::uint64_t seed);

/// Replication i uses seed base_seed + i. Results are reduced in index order,
/// so the report does not depend on the number of threads.
MetricsReport monte_carlo(const SimulationConfig& config);
MetricsReport summarize(std::span<const RunOutcome> outcomes, const ModelParams& model);

/// Binary search for the threshold whose in-control ARL is within
/// `arl_tolerance` of `target_arl0`. The hotspot change is switched off for
/// the search. Every probe reuses the same replication seeds, so the
/// estimated ARL is nondecreasing in the threshold. Throws CalibrationError
/// when even `h_hi` falls short of the target.
CalibrationResult calibrate_threshold(const SimulationConfig& config);

struct RegionSummary {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double mean = 0.0;
    Count min = 0;
    Count max = 0;
};

struct PhaseSummary {
    std::size_t days = 0;
    std::vector<RegionSummary> regions;
};

struct BehaviorReport {
    PhaseSummary in_control;
    PhaseSummary out_of_control;
    /// Day-by-region allocations for both phases, in day order.
    std::vector<std::vector<Count>> allocation_trace;
};

/// Runs `ic_days` in control, then `oc_days` with the configured hotspots
/// shifted to q, without stopping at alarms. Uses seed `base_seed`.
BehaviorReport behavior_study(const SimulationConfig& config, std::size_t ic_days, std::size_t oc_days);

/// Quantile with linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double prob);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace aracusum
