#include "aracusum/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "aracusum/error.hpp"

namespace aracusum {

namespace {

// Precomputed per-region coefficients of the reward curve.
struct RewardCurve {
    double mean;      // m
    double spread;    // v
    double inv_size;  // 1 / s

    RewardCurve(double alpha, double beta) {
        if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
            throw DomainError("reward requires positive finite alpha and beta");
        }
        const double s = alpha + beta;
        mean = alpha / s;
        spread = alpha * beta / (s * (s + 1.0));
        inv_size = 1.0 / s;
    }

    // c v (c / s + 1), the predictive variance of the positive count.
    double variance(double c) const { return c * spread * (c * inv_size + 1.0); }

    double value(double c) const { return mean * c + std::sqrt(variance(c)); }

    // f(c+1) - f(c) with the square-root difference rationalised:
    // sqrt(x1) - sqrt(x0) = (x1 - x0) / (sqrt(x1) + sqrt(x0)), and
    // x1 - x0 = v ((2c + 1) / s + 1). Avoids cancellation for large c.
    double increment(double c, double sd_c, double sd_next) const {
        return mean + spread * ((2.0 * c + 1.0) * inv_size + 1.0) / (sd_next + sd_c);
    }
};

void require_tests(Count tests) {
    if (tests < 0) throw DomainError("test count must be nonnegative");
}

}  // namespace

Count AllocationVector::total() const {
    return std::accumulate(counts.begin(), counts.end(), Count{0});
}

double reward(Count tests, double alpha, double beta) {
    require_tests(tests);
    const RewardCurve curve(alpha, beta);
    return curve.value(static_cast<double>(tests));
}

double reward_increment(Count tests, double alpha, double beta) {
    require_tests(tests);
    const RewardCurve curve(alpha, beta);
    const auto c = static_cast<double>(tests);
    return curve.increment(c, std::sqrt(curve.variance(c)), std::sqrt(curve.variance(c + 1.0)));
}

double allocation_objective(const PosteriorState& posterior, const std::vector<Count>& counts) {
    if (counts.size() != posterior.num_regions()) {
        throw DimensionError("allocation and posterior disagree on region count");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        total += reward(counts[k], posterior.alpha[k], posterior.beta[k]);
    }
    return total;
}

namespace {

// Continuous count at which the reward slope drops to `level`:
// solves f'(c) = level for c >= 0. Infinite when the slope never gets that low.
double slope_crossing(const RewardCurve& curve, double level) {
    const double s = 1.0 / curve.inv_size;
    const double gap = level - curve.mean;
    const double floor_sq = curve.spread * curve.inv_size;  // (asymptotic slope - mean)^2
    if (gap <= 0.0 || gap * gap <= floor_sq) return std::numeric_limits<double>::infinity();
    const double disc = s * s + curve.spread * s / (gap * gap - floor_sq);
    return std::max(0.0, 0.5 * (std::sqrt(disc) - s));
}

// Per-region counts that unit-by-unit greedy is certain to hand out first.
// For a level mu, prefix_k is the number of increments of region k strictly
// above mu. Increments are non-increasing, so every increment inside the
// prefixes exceeds every increment outside them and greedy takes exactly the
// prefixes before anything else. mu comes from the continuous relaxation,
// aimed at leaving roughly K units for the unit-by-unit finish.
std::vector<Count> greedy_prefix(const std::vector<RewardCurve>& curves, Count budget) {
    const std::size_t K = curves.size();
    std::vector<Count> none(K, 0);
    const auto target = static_cast<double>(budget) - 2.0 * static_cast<double>(K);
    if (target < static_cast<double>(2 * K)) return none;

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& c : curves) {
        lo = std::min(lo, c.mean + std::sqrt(c.spread * c.inv_size));
        hi = std::max(hi, c.increment(0.0, 0.0, std::sqrt(c.variance(1.0))));
    }
    for (int iter = 0; iter < 40; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double sum = 0.0;
        for (const auto& c : curves) sum += std::min(slope_crossing(c, mid), target + 1.0);
        if (sum > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double level = hi;

    auto gain = [&](std::size_t k, Count c) {
        const auto x = static_cast<double>(c);
        return curves[k].increment(x, std::sqrt(curves[k].variance(x)), std::sqrt(curves[k].variance(x + 1.0)));
    };
    std::vector<Count> prefix(K, 0);
    Count assigned = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const double cross = slope_crossing(curves[k], level);
        if (!std::isfinite(cross)) return none;
        // The increment at j is the slope somewhere in (j, j+1), so only the
        // unit straddling the crossing needs an explicit check.
        auto c = static_cast<Count>(std::floor(cross));
        if (gain(k, c) > level) ++c;
        if ((c > 0 && !(gain(k, c - 1) > level)) || gain(k, c) > level) return none;
        prefix[k] = c;
        assigned += c;
    }
    if (assigned > budget) return none;
    return prefix;
}

std::vector<RewardCurve> curves_of(const PosteriorState& posterior, Count budget) {
    const std::size_t K = posterior.num_regions();
    if (K == 0) throw DomainError("greedy allocation needs at least one region");
    if (posterior.beta.size() != K) throw DimensionError("posterior alpha/beta length mismatch");
    if (budget < 1) throw DomainError("budget must be at least 1");
    std::vector<RewardCurve> curves;
    curves.reserve(K);
    for (std::size_t k = 0; k < K; ++k) curves.emplace_back(posterior.alpha[k], posterior.beta[k]);
    return curves;
}

// Unit-by-unit greedy starting from `counts`.
void greedy_fill(const std::vector<RewardCurve>& curves, std::vector<Count>& counts, Count budget) {
    struct Slot {
        double gain;
        std::size_t region;
    };
    // Max-heap on gain; among equal gains the lowest region index is on top.
    auto lower_priority = [](const Slot& x, const Slot& y) {
        if (x.gain != y.gain) return x.gain < y.gain;
        return x.region > y.region;
    };
    const std::size_t K = curves.size();
    // sd_next[k] caches sqrt(variance(counts[k] + 1)) so each step needs one sqrt.
    std::vector<double> sd_next(K);
    std::vector<Slot> slots;
    slots.reserve(K);
    Count remaining = budget;
    for (std::size_t k = 0; k < K; ++k) {
        const auto c = static_cast<double>(counts[k]);
        sd_next[k] = std::sqrt(curves[k].variance(c + 1.0));
        slots.push_back({curves[k].increment(c, std::sqrt(curves[k].variance(c)), sd_next[k]), k});
        remaining -= counts[k];
    }
    std::priority_queue<Slot, std::vector<Slot>, decltype(lower_priority)> heap(lower_priority,
                                                                                std::move(slots));
    for (; remaining > 0; --remaining) {
        const std::size_t k = heap.top().region;
        heap.pop();
        const auto c = static_cast<double>(++counts[k]);
        const double sd_c = sd_next[k];
        sd_next[k] = std::sqrt(curves[k].variance(c + 1.0));
        heap.push({curves[k].increment(c, sd_c, sd_next[k]), k});
    }
}

}  // namespace

AllocationVector greedy_allocate(const PosteriorState& posterior, Count budget) {
    const auto curves = curves_of(posterior, budget);
    AllocationVector out{greedy_prefix(curves, budget), budget};
    greedy_fill(curves, out.counts, budget);
    return out;
}

AllocationVector greedy_allocate_by_units(const PosteriorState& posterior, Count budget) {
    const auto curves = curves_of(posterior, budget);
    AllocationVector out{std::vector<Count>(curves.size(), 0), budget};
    greedy_fill(curves, out.counts, budget);
    return out;
}

AllocationVector brute_force_allocate(const PosteriorState& posterior, Count budget) {
    const std::size_t K = posterior.num_regions();
    if (K == 0 || K > kBruteForceMaxRegions || budget < 1 || budget > kBruteForceMaxBudget) {
        throw DomainError("brute force enumeration limited to 1 <= K <= 6 and 1 <= budget <= 15 (got K=" +
                          std::to_string(K) + ", budget=" + std::to_string(budget) + ")");
    }
    // Reward table per region and count, so enumeration only sums.
    std::vector<std::vector<double>> table(K, std::vector<double>(static_cast<std::size_t>(budget) + 1));
    for (std::size_t k = 0; k < K; ++k) {
        for (Count c = 0; c <= budget; ++c) {
            table[k][static_cast<std::size_t>(c)] = reward(c, posterior.alpha[k], posterior.beta[k]);
        }
    }

    std::vector<Count> current(K, 0);
    std::vector<Count> best;
    double best_value = -1.0;

    // Depth-first enumeration of compositions; the last region takes the rest.
    auto recurse = [&](auto&& self, std::size_t k, Count remaining, double partial) -> void {
        if (k + 1 == K) {
            current[k] = remaining;
            const double value = partial + table[k][static_cast<std::size_t>(remaining)];
            if (value > best_value) {
                best_value = value;
                best = current;
            }
            return;
        }
        for (Count c = remaining; c >= 0; --c) {
            current[k] = c;
            self(self, k + 1, remaining - c, partial + table[k][static_cast<std::size_t>(c)]);
        }
    };
    recurse(recurse, 0, budget, 0.0);
    return {best, budget};
}

}  // namespace aracusum
