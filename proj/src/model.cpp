#include "aracusum/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aracusum/error.hpp"

namespace aracusum {

namespace {

void require_rate(double r, const char* name) {
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError(std::string(name) + " must lie in (0,1), got " + std::to_string(r));
    }
}

}  // namespace

void ModelParams::validate() const {
    if (num_regions == 0) throw DomainError("num_regions must be positive");
    require_rate(in_control_rate, "in_control_rate");
    require_rate(out_of_control_rate, "out_of_control_rate");
    if (!(in_control_rate < out_of_control_rate)) {
        throw DomainError("out_of_control_rate must exceed in_control_rate (upward shifts only)");
    }
    if (budget < 1) throw DomainError("budget must be at least 1");
    if (std::isnan(threshold)) throw DomainError("threshold is NaN");
    for (auto h : hotspots) {
        if (h >= num_regions) {
            throw DomainError("hotspot index " + std::to_string(h) + " out of range for " +
                              std::to_string(num_regions) + " regions");
        }
    }
}

bool ModelParams::is_hotspot(std::size_t region) const {
    return std::find(hotspots.begin(), hotspots.end(), region) != hotspots.end();
}

double ModelParams::rate_at(std::size_t region, std::size_t t) const {
    if (change_time && t > *change_time && is_hotspot(region)) return out_of_control_rate;
    return in_control_rate;
}

void ObservationBatch::validate(std::size_t num_regions) const {
    if (tests.size() != num_regions || positives.size() != num_regions) {
        throw DimensionError("observation batch has " + std::to_string(tests.size()) + " test and " +
                             std::to_string(positives.size()) + " positive entries, expected " +
                             std::to_string(num_regions));
    }
    for (std::size_t k = 0; k < num_regions; ++k) {
        if (tests[k] < 0 || positives[k] < 0 || positives[k] > tests[k]) {
            throw DomainError("region " + std::to_string(k) + ": need 0 <= positives <= tests");
        }
    }
}

double llr_increment(Count tests, Count positives, double p, double q) {
    require_rate(p, "p");
    require_rate(q, "q");
    if (tests < 0 || positives < 0 || positives > tests) {
        throw DomainError("llr_increment requires 0 <= positives <= tests");
    }
    if (tests == 0) return 0.0;
    const double miss = std::log((1.0 - q) / (1.0 - p));
    const double hit = std::log(q * (1.0 - p) / (p * (1.0 - q)));
    return static_cast<double>(tests) * miss + static_cast<double>(positives) * hit;
}

void cusum_step_inplace(std::span<double> stats, std::span<const Count> tests,
                        std::span<const Count> positives, double p, double q) {
    const double miss = std::log((1.0 - q) / (1.0 - p));
    const double hit = std::log(q * (1.0 - p) / (p * (1.0 - q)));
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const double prior = std::max(stats[k], 0.0);
        stats[k] = prior + static_cast<double>(tests[k]) * miss +
                   static_cast<double>(positives[k]) * hit;
    }
}

CusumState cusum_step(const CusumState& state, const ObservationBatch& batch,
                      const ModelParams& params) {
    const std::size_t K = params.num_regions;
    if (state.stats.size() != K) {
        throw DimensionError("CUSUM state has " + std::to_string(state.stats.size()) +
                             " regions, model has " + std::to_string(K));
    }
    if (batch.time != state.time + 1) {
        throw DimensionError("batch time " + std::to_string(batch.time) + " does not follow state time " +
                             std::to_string(state.time));
    }
    batch.validate(K);
    require_rate(params.in_control_rate, "in_control_rate");
    require_rate(params.out_of_control_rate, "out_of_control_rate");

    CusumState next{state.stats, batch.time};
    cusum_step_inplace(next.stats, batch.tests, batch.positives, params.in_control_rate,
                       params.out_of_control_rate);
    return next;
}

AlarmReport check_alarm(std::span<const double> stats, double threshold) {
    if (stats.empty()) return {};
    // max_element returns the first maximum, which is the lowest index on ties.
    auto it = std::max_element(stats.begin(), stats.end());
    if (*it > threshold) {
        return {true, static_cast<std::size_t>(it - stats.begin())};
    }
    return {};
}

AlarmReport check_alarm(const CusumState& state, double threshold) {
    return check_alarm(std::span<const double>(state.stats), threshold);
}

}  // namespace aracusum
