#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "aracusum/model.hpp"
#include "aracusum/planner.hpp"
#include "aracusum/posterior.hpp"

namespace aracusum {

enum class PolicyKind { Ara, Even, TopR };

std::string_view to_string(PolicyKind kind);
/// Accepts "ara" (alias "proposed"), "even", "topr" (alias "top-r").
PolicyKind parse_policy_kind(std::string_view name);

/// How the next day's tests are split across regions.
///
///  - Ara:  greedy UCB planning over the current posterior.
///  - Even: floor(C/K) everywhere, the remainder one each to the lowest indices.
///  - TopR: C cut into `num_batches` equal batches dealt to the `top_r`
///          regions with the largest CUSUM statistic (round-robin in rank
///          order, so one batch per region when num_batches == top_r).
struct AllocatorPolicy {
    PolicyKind kind = PolicyKind::Ara;
    std::size_t num_batches = 20;
    std::size_t top_r = 20;

    static AllocatorPolicy ara() { return {PolicyKind::Ara}; }
    static AllocatorPolicy even() { return {PolicyKind::Even}; }
    static AllocatorPolicy topr(std::size_t batches, std::size_t r) { return {PolicyKind::TopR, batches, r}; }

    /// Checks the TopR constraints against a problem size.
    void validate(std::size_t num_regions, Count budget) const;
};

AllocationVector even_allocate(std::size_t num_regions, Count budget);
AllocationVector topr_allocate(std::span<const double> cusum_stats, Count budget,
                               std::size_t num_batches, std::size_t top_r);

AllocationVector allocate(const AllocatorPolicy& policy, const CusumState& cusum,
                          const PosteriorState& posterior, Count budget);

}  // namespace aracusum
