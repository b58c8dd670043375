#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "aracusum/error.hpp"
#include "aracusum/planner.hpp"

using namespace aracusum;

namespace {

// Reward evaluated straight from the definition, without the library.
double reward_oracle(double c, double alpha, double beta) {
    const double s = alpha + beta;
    const double v = alpha * beta / (s * s * (s + 1.0));
    return alpha / s * c + std::sqrt(c * s * v * (c / s + 1.0));
}

PosteriorState random_posterior(std::mt19937_64& gen, std::size_t K, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    PosteriorState s;
    for (std::size_t k = 0; k < K; ++k) {
        s.alpha.push_back(std::exp(u(gen)));
        s.beta.push_back(std::exp(u(gen)));
    }
    return s;
}

}  // namespace

TEST_CASE("reward examples") {
    CHECK(reward(0, 2.0, 7.0) == 0.0);
    CHECK(reward(1, 1, 1) == doctest::Approx(1.0));
    CHECK(std::abs(reward(2, 3, 1) - 2.17082) < 1e-5);
    CHECK(reward_increment(0, 1, 1) == doctest::Approx(1.0));
    CHECK(std::abs(reward_increment(1, 3, 1) - 0.98781) < 1e-5);
    CHECK_THROWS_AS(reward(1, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(reward(-1, 1.0, 1.0), DomainError);
}

TEST_CASE("reward matches its definition") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 200; ++i) {
        auto s = random_posterior(gen, 1, 0.01, 100);
        for (Count c : {0, 1, 5, 100, 4000}) {
            CHECK(reward(c, s.alpha[0], s.beta[0]) ==
                  doctest::Approx(reward_oracle(static_cast<double>(c), s.alpha[0], s.beta[0])).epsilon(1e-12));
        }
        CHECK(reward_increment(7, s.alpha[0], s.beta[0]) ==
              doctest::Approx(reward_oracle(8, s.alpha[0], s.beta[0]) - reward_oracle(7, s.alpha[0], s.beta[0]))
                  .epsilon(1e-9));
    }
}

TEST_CASE("reward increments are positive and non-increasing") {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 300; ++i) {
        auto s = random_posterior(gen, 1, 0.01, 100);
        double prev = reward_increment(0, s.alpha[0], s.beta[0]);
        REQUIRE(prev > 0.0);
        for (Count c = 1; c < 1000; ++c) {
            const double g = reward_increment(c, s.alpha[0], s.beta[0]);
            REQUIRE(g > 0.0);
            REQUIRE(g <= prev + 1e-12);
            prev = g;
        }
    }
}

TEST_CASE("greedy allocation examples") {
    PosteriorState s{{3, 1}, {1, 3}, 0};
    auto a = greedy_allocate(s, 2);
    CHECK(a.counts == std::vector<Count>{2, 0});
    CHECK(a.budget == 2);
    CHECK(allocation_objective(s, a.counts) == doctest::Approx(2.17082).epsilon(1e-5));

    PosteriorState same{std::vector<double>(4, 2.0), std::vector<double>(4, 9.0), 0};
    CHECK(greedy_allocate(same, 12).counts == std::vector<Count>(4, 3));

    PosteriorState desk{std::vector<double>(39, 19.5), std::vector<double>(39, 1930.5), 0};
    CHECK(greedy_allocate(desk, 3900).counts == std::vector<Count>(39, 100));

    PosteriorState one{{0.5}, {7.0}, 0};
    CHECK(greedy_allocate(one, 17).counts == std::vector<Count>{17});

    PosteriorState sym{{1, 1}, {1, 1}, 0};
    CHECK(allocation_objective(sym, {1, 0}) == allocation_objective(sym, {0, 1}));
    CHECK(greedy_allocate(sym, 1).counts == std::vector<Count>{1, 0});

    CHECK_THROWS_AS(greedy_allocate(sym, 0), DomainError);
    CHECK_THROWS_AS(greedy_allocate(PosteriorState{}, 3), DomainError);
}

TEST_CASE("greedy matches brute force on small instances") {
    std::mt19937_64 gen(17);
    for (int i = 0; i < 300; ++i) {
        const std::size_t K = 1 + gen() % 6;
        const Count C = 1 + static_cast<Count>(gen() % 15);
        auto s = random_posterior(gen, K, 0.01, 100);
        const auto g = greedy_allocate(s, C);
        const auto b = brute_force_allocate(s, C);
        REQUIRE(g.total() == C);
        const double og = allocation_objective(s, g.counts);
        const double ob = allocation_objective(s, b.counts);
        REQUIRE(std::abs(og - ob) <= 1e-9 * std::abs(ob));
    }
    PosteriorState big{std::vector<double>(7, 1.0), std::vector<double>(7, 1.0), 0};
    CHECK_THROWS_AS(brute_force_allocate(big, 3), DomainError);
}

TEST_CASE("warm-started greedy equals unit-by-unit greedy") {
    std::mt19937_64 gen(23);
    for (int i = 0; i < 300; ++i) {
        const std::size_t K = 1 + gen() % 60;
        const Count C = 1 + static_cast<Count>(gen() % 8000);
        auto s = (i % 2 == 0) ? random_posterior(gen, K, 0.01, 100) : random_posterior(gen, K, 5, 5000);
        REQUIRE(greedy_allocate(s, C) == greedy_allocate_by_units(s, C));
    }
}
