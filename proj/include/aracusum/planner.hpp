#pragma once

#include <cstddef>
#include <vector>

#include "aracusum/model.hpp"
#include "aracusum/posterior.hpp"

namespace aracusum {

/// Tests assigned to each region for one day. Sums to `budget`.
struct AllocationVector {
    std::vector<Count> counts;
    Count budget = 0;

    Count total() const;
    std::size_t size() const { return counts.size(); }
    bool operator==(const AllocationVector&) const = default;
};

/// Upper-confidence reward of sending `tests` kits to a region whose rate
/// posterior is Beta(alpha, beta):
///
///   f(c) = m c + sqrt(c v (c / s + 1)),   s = alpha + beta, m = alpha / s,
///                                         v = alpha beta / (s (s + 1)).
///
/// The first term is the posterior-mean count of positives, the second the
/// predictive standard deviation of the beta-binomial count.
double reward(Count tests, double alpha, double beta);

/// f(c + 1) - f(c). Strictly positive and non-increasing in c.
double reward_increment(Count tests, double alpha, double beta);

/// Sum of rewards of an allocation under a posterior.
double allocation_objective(const PosteriorState& posterior, const std::vector<Count>& counts);

/// Hands out the budget one kit at a time to the region with the largest
/// current reward increment (lowest index on ties). Since every region's
/// reward is concave this attains the maximum of the separable objective.
AllocationVector greedy_allocate(const PosteriorState& posterior, Count budget);

/// Same result as greedy_allocate, computed strictly one unit at a time
/// (O(C log K)). greedy_allocate skips ahead over the units whose placement
/// is already decided by the continuous relaxation.
AllocationVector greedy_allocate_by_units(const PosteriorState& posterior, Count budget);

/// Exhaustive search over all compositions of `budget` into K parts.
/// Limited to K <= 6 and budget <= 15.
AllocationVector brute_force_allocate(const PosteriorState& posterior, Count budget);

inline constexpr std::size_t kBruteForceMaxRegions = 6;
inline constexpr Count kBruteForceMaxBudget = 15;

}  // namespace aracusum
