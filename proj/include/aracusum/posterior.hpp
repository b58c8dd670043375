#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aracusum/model.hpp"

namespace aracusum {

/// Beta(a, b) prior on each region's rate plus the geometric decay w applied
/// to past observations (day t of T carries weight w^(T-t)).
struct PriorConfig {
    double a = 1.0;
    double b = 1.0;
    double decay = 1.0;

    void validate() const;
};

/// Per-region Beta(alpha_k, beta_k) posterior after `time` days.
struct PosteriorState {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::size_t time = 0;

    std::size_t num_regions() const { return alpha.size(); }
};

struct BetaMoments {
    double mean;
    double variance;
};

PosteriorState posterior_init(const PriorConfig& prior, std::size_t num_regions);

/// Constant-time recursion: alpha' = a + w (alpha - a) + X, beta' = b + w (beta - b) + (c - X).
PosteriorState posterior_update(const PosteriorState& state, const ObservationBatch& batch,
                                const PriorConfig& prior);

/// Hot-path variant without validation; spans must all have length K.
void posterior_update_inplace(std::span<double> alpha, std::span<double> beta,
                              std::span<const Count> tests, std::span<const Count> positives,
                              const PriorConfig& prior);

/// Direct weighted sums over the whole history. O(T K); used as the
/// reference for the recursion. Batches must be in strictly increasing time
/// order; the weight of batch t is w^(T - t) with T the last batch's time.
PosteriorState posterior_from_history(const PriorConfig& prior, std::size_t num_regions,
                                      std::span<const ObservationBatch> history);

BetaMoments beta_moments(double alpha, double beta);
BetaMoments posterior_moments(const PosteriorState& state, std::size_t region);

}  // namespace aracusum
