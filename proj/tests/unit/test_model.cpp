#include <cmath>
#include <random>

#include "doctest.h"

#include "aracusum/error.hpp"
#include "aracusum/model.hpp"

using namespace aracusum;

namespace {

// Log of the binomial pmf evaluated term by term.
double log_binom_pmf(long c, long x, double r) {
    return std::lgamma(c + 1.0) - std::lgamma(x + 1.0) - std::lgamma(c - x + 1.0) + x * std::log(r) +
           (c - x) * std::log1p(-r);
}

}  // namespace

TEST_CASE("llr increment examples") {
    CHECK(std::abs(llr_increment(100, 0, 0.01, 0.05) - -4.12435) < 1e-4);
    CHECK(std::abs(llr_increment(100, 5, 0.01, 0.05) - 4.12905) < 1e-4);
    CHECK(llr_increment(0, 0, 0.01, 0.05) == 0.0);
}

TEST_CASE("llr increment equals log pmf ratio") {
    for (double p : {0.005, 0.01, 0.02}) {
        for (double q : {0.025, 0.05, 0.1}) {
            for (long c = 0; c <= 200; c += 7) {
                for (long x = 0; x <= c; ++x) {
                    const double oracle = log_binom_pmf(c, x, q) - log_binom_pmf(c, x, p);
                    REQUIRE(std::abs(llr_increment(c, x, p, q) - oracle) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("llr increment rejects bad input") {
    CHECK_THROWS_AS(llr_increment(10, 11, 0.01, 0.05), DomainError);
    CHECK_THROWS_AS(llr_increment(-1, 0, 0.01, 0.05), DomainError);
    CHECK_THROWS_AS(llr_increment(10, 1, 0.0, 0.05), DomainError);
    CHECK_THROWS_AS(llr_increment(10, 1, 0.01, 1.0), DomainError);
}

TEST_CASE("cusum step clamps the previous value") {
    ModelParams m{1, 0.01, 0.05, 100, 6.5, {0}, std::nullopt};
    CusumState s{{-2.0}, 0};
    // A negative state is clamped to zero before the increment is added.
    ObservationBatch b{1, {100}, {5}};
    const double d = llr_increment(100, 5, 0.01, 0.05);
    auto next = cusum_step(s, b, m);
    CHECK(next.stats[0] == doctest::Approx(d));
    CHECK(next.time == 1);

    s = CusumState{{0.0}, 0};
    CHECK(std::abs(cusum_step(s, ObservationBatch{1, {100}, {0}}, m).stats[0] - -4.12435) < 1e-4);
    s = CusumState{{3.0}, 0};
    CHECK(std::abs(cusum_step(s, b, m).stats[0] - 7.12905) < 1e-4);
}

TEST_CASE("cusum step validates") {
    ModelParams m{2, 0.01, 0.05, 10, 1.0, {0}, std::nullopt};
    auto s = CusumState::zeros(2);
    CHECK_THROWS_AS(cusum_step(s, ObservationBatch{1, {5}, {0}}, m), DimensionError);
    CHECK_THROWS_AS(cusum_step(s, ObservationBatch{2, {5, 5}, {0, 0}}, m), DimensionError);
    CHECK_THROWS_AS(cusum_step(s, ObservationBatch{1, {5, 5}, {6, 0}}, m), DomainError);
}

TEST_CASE("alarm rule") {
    auto a = check_alarm(std::vector<double>{0, 6.6, 1}, 6.5);
    CHECK(a.fired);
    CHECK(a.region == 1u);
    a = check_alarm(std::vector<double>{0, 0, 0}, 0.0);
    CHECK_FALSE(a.fired);
    CHECK_FALSE(a.region.has_value());
    a = check_alarm(std::vector<double>{5, 5}, 4.0);
    CHECK(a.fired);
    CHECK(a.region == 0u);
    a = check_alarm(std::vector<double>{6.5}, 6.5);
    CHECK_FALSE(a.fired);
}

TEST_CASE("model params validation and rate schedule") {
    ModelParams m{3, 0.01, 0.05, 30, 1.0, {2}, 5};
    CHECK_NOTHROW(m.validate());
    CHECK(m.rate_at(2, 5) == 0.01);
    CHECK(m.rate_at(2, 6) == 0.05);
    CHECK(m.rate_at(1, 6) == 0.01);
    m.change_time.reset();
    CHECK(m.rate_at(2, 1000) == 0.01);

    auto bad = m;
    bad.out_of_control_rate = 0.005;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = m;
    bad.hotspots = {3};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = m;
    bad.budget = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("cusum step adds the increment to the clamped state") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> w{u(gen), u(gen)};
        const auto before = w;
        const std::vector<Count> c{100, 37}, x{2, 1};
        cusum_step_inplace(w, c, x, 0.01, 0.05);
        for (std::size_t k = 0; k < 2; ++k) {
            const double inc = llr_increment(c[k], x[k], 0.01, 0.05);
            CHECK(w[k] == doctest::Approx(std::max(before[k], 0.0) + inc).epsilon(1e-14));
        }
    }
}
