#include "aracusum/posterior.hpp"

#include <cmath>
#include <string>

#include "aracusum/error.hpp"

namespace aracusum {

void PriorConfig::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("prior a must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("prior b must be positive");
    if (!(decay > 0.0 && decay <= 1.0)) throw DomainError("decay must lie in (0,1]");
}

PosteriorState posterior_init(const PriorConfig& prior, std::size_t num_regions) {
    prior.validate();
    if (num_regions == 0) throw DomainError("num_regions must be positive");
    return {std::vector<double>(num_regions, prior.a), std::vector<double>(num_regions, prior.b), 0};
}

void posterior_update_inplace(std::span<double> alpha, std::span<double> beta,
                              std::span<const Count> tests, std::span<const Count> positives,
                              const PriorConfig& prior) {
    const double w = prior.decay;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        const auto x = static_cast<double>(positives[k]);
        const auto miss = static_cast<double>(tests[k] - positives[k]);
        alpha[k] = prior.a + w * (alpha[k] - prior.a) + x;
        beta[k] = prior.b + w * (beta[k] - prior.b) + miss;
    }
}

PosteriorState posterior_update(const PosteriorState& state, const ObservationBatch& batch,
                                const PriorConfig& prior) {
    prior.validate();
    const std::size_t K = state.num_regions();
    if (state.beta.size() != K) throw DimensionError("posterior alpha/beta length mismatch");
    if (batch.time != state.time + 1) {
        throw DimensionError("batch time " + std::to_string(batch.time) + " does not follow posterior time " +
                             std::to_string(state.time));
    }
    batch.validate(K);
    PosteriorState next = state;
    next.time = batch.time;
    posterior_update_inplace(next.alpha, next.beta, batch.tests, batch.positives, prior);
    return next;
}

PosteriorState posterior_from_history(const PriorConfig& prior, std::size_t num_regions,
                                      std::span<const ObservationBatch> history) {
    PosteriorState out = posterior_init(prior, num_regions);
    if (history.empty()) return out;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].time <= history[i - 1].time) {
            throw DimensionError("history is not in increasing time order at entry " + std::to_string(i));
        }
    }
    const std::size_t T = history.back().time;
    for (const auto& batch : history) {
        batch.validate(num_regions);
        const double weight = std::pow(prior.decay, static_cast<double>(T - batch.time));
        for (std::size_t k = 0; k < num_regions; ++k) {
            out.alpha[k] += weight * static_cast<double>(batch.positives[k]);
            out.beta[k] += weight * static_cast<double>(batch.tests[k] - batch.positives[k]);
        }
    }
    out.time = T;
    return out;
}

BetaMoments beta_moments(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("Beta parameters must be positive");
    const double s = alpha + beta;
    return {alpha / s, alpha * beta / (s * s * (s + 1.0))};
}

BetaMoments posterior_moments(const PosteriorState& state, std::size_t region) {
    if (region >= state.num_regions()) {
        throw DimensionError("region " + std::to_string(region) + " out of range");
    }
    return beta_moments(state.alpha[region], state.beta[region]);
}

}  // namespace aracusum
