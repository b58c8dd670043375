#include "aracusum/allocators.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "aracusum/error.hpp"

namespace aracusum {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Ara: return "ara";
        case PolicyKind::Even: return "even";
        case PolicyKind::TopR: return "topr";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
    if (name == "ara" || name == "proposed") return PolicyKind::Ara;
    if (name == "even") return PolicyKind::Even;
    if (name == "topr" || name == "top-r") return PolicyKind::TopR;
    throw ConfigError("unknown policy kind '" + std::string(name) + "' (expected ara, even or topr)");
}

void AllocatorPolicy::validate(std::size_t num_regions, Count budget) const {
    if (kind != PolicyKind::TopR) return;
    if (num_batches == 0) throw DomainError("TopR needs at least one batch");
    if (top_r == 0 || top_r > num_regions) {
        throw DomainError("TopR top_r=" + std::to_string(top_r) + " must lie in [1, " +
                          std::to_string(num_regions) + "]");
    }
    if (budget % static_cast<Count>(num_batches) != 0) {
        throw DomainError("TopR budget " + std::to_string(budget) + " is not divisible by " +
                          std::to_string(num_batches) + " batches");
    }
}

AllocationVector even_allocate(std::size_t num_regions, Count budget) {
    if (num_regions == 0) throw DomainError("even allocation needs at least one region");
    const auto K = static_cast<Count>(num_regions);
    AllocationVector out{std::vector<Count>(num_regions, budget / K), budget};
    for (Count k = 0; k < budget % K; ++k) ++out.counts[static_cast<std::size_t>(k)];
    return out;
}

AllocationVector topr_allocate(std::span<const double> cusum_stats, Count budget,
                               std::size_t num_batches, std::size_t top_r) {
    const std::size_t K = cusum_stats.size();
    AllocatorPolicy{PolicyKind::TopR, num_batches, top_r}.validate(K, budget);

    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return cusum_stats[x] > cusum_stats[y];
    });

    const Count batch = budget / static_cast<Count>(num_batches);
    AllocationVector out{std::vector<Count>(K, 0), budget};
    for (std::size_t i = 0; i < num_batches; ++i) out.counts[order[i % top_r]] += batch;
    return out;
}

AllocationVector allocate(const AllocatorPolicy& policy, const CusumState& cusum,
                          const PosteriorState& posterior, Count budget) {
    const std::size_t K = posterior.num_regions();
    if (cusum.stats.size() != K) throw DimensionError("CUSUM and posterior disagree on region count");
    switch (policy.kind) {
        case PolicyKind::Ara: return greedy_allocate(posterior, budget);
        case PolicyKind::Even: return even_allocate(K, budget);
        case PolicyKind::TopR:
            return topr_allocate(cusum.stats, budget, policy.num_batches, policy.top_r);
    }
    throw DomainError("unknown policy");
}

}  // namespace aracusum
