#pragma once

#include <cstdint>
#include <string_view>

#include <boost/random/mersenne_twister.hpp>

#include "aracusum/model.hpp"

namespace aracusum {

/// 64-bit Mersenne Twister. Its output sequence is fixed by the standard
/// definition, so a seed reproduces the same stream on every platform.
using Rng = boost::random::mt19937_64;

/// Identifies the generator and binomial sampler recorded in outputs.
/// Bump when either changes so stale results are recognisable.
inline constexpr std::string_view kGeneratorId = "mt19937_64+boost-binomial/1";

/// Exact Binomial(trials, prob) draw; prob may be 0 or 1.
Count sample_binomial(Rng& rng, Count trials, double prob);

}  // namespace aracusum
