#include "aracusum/random.hpp"

#include <boost/random/binomial_distribution.hpp>

#include "aracusum/error.hpp"

namespace aracusum {

Count sample_binomial(Rng& rng, Count trials, double prob) {
    if (trials < 0 || !(prob >= 0.0 && prob <= 1.0)) {
        throw DomainError("binomial sampling needs trials >= 0 and prob in [0,1]");
    }
    if (trials == 0 || prob == 0.0) return 0;
    if (prob == 1.0) return trials;
    boost::random::binomial_distribution<Count, double> dist(trials, prob);
    return dist(rng);
}

}  // namespace aracusum
