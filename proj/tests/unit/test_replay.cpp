#include <chrono>
#include <cstdio>
#include <sstream>

#include "doctest.h"

#include "aracusum/error.hpp"
#include "aracusum/replay.hpp"
#include "aracusum/simulation.hpp"

using namespace aracusum;

namespace {

std::string matrix_csv(std::size_t days, std::size_t regions, double rate) {
    std::ostringstream os;
    os << "date";
    for (std::size_t k = 0; k < regions; ++k) os << ",R" << k + 1;
    os << '\n';
    for (std::size_t t = 0; t < days; ++t) {
        os << "2020-03-" << (t + 1 < 10 ? "0" : "") << t + 1;
        for (std::size_t k = 0; k < regions; ++k) os << ',' << rate;
        os << '\n';
    }
    return os.str();
}

}  // namespace

TEST_CASE("rate matrix parsing") {
    std::istringstream one("date,Adams\n2020-06-01,0.01\n");
    auto m = parse_rate_matrix(one);
    CHECK(m.num_days() == 1);
    CHECK(m.num_regions() == 1);
    CHECK(m.region_names[0] == "Adams");
    CHECK(m.dates[0] == "2020-06-01");
    CHECK(m.rates[0][0] == 0.01);

    std::istringstream full(matrix_csv(20, 4, 0.02));
    CHECK(parse_rate_matrix(full).num_days() == 20);
}

TEST_CASE("rate matrix errors name row and column") {
    std::string text = matrix_csv(12, 4, 0.02);
    // Row 10, column 3 sits on line 11.
    std::istringstream lines(text);
    std::string out, line;
    for (int i = 1; std::getline(lines, line); ++i) {
        if (i == 11) line = "2020-03-10,0.02,0.02,1.5,0.02";
        out += line + "\n";
    }
    std::istringstream in(out);
    try {
        parse_rate_matrix(in);
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("row 10, column 3") != std::string::npos);
        CHECK(e.line() == 11);
        CHECK(e.column() == 3);
    }

    std::istringstream gap("date,A\n2020-03-01,0.1\n2020-03-03,0.1\n");
    CHECK_THROWS_AS(parse_rate_matrix(gap), DataError);
    std::istringstream ragged("date,A,B\n2020-03-01,0.1\n");
    CHECK_THROWS_AS(parse_rate_matrix(ragged), DataError);
    std::istringstream junk("date,A\n2020-03-01,abc\n");
    CHECK_THROWS_AS(parse_rate_matrix(junk), DataError);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_rate_matrix(empty), DataError);
    CHECK_THROWS_AS(load_rate_matrix("/nonexistent/rates.csv"), DataError);
}

TEST_CASE("zero rates never alarm") {
    std::istringstream in(matrix_csv(30, 5, 0.0));
    auto m = parse_rate_matrix(in);
    ModelParams model{5, 0.01, 0.05, 500, 6.5, {}, std::nullopt};
    auto r = replay(m, model, AllocatorPolicy::ara(), {5.0, 495.0, 0.3}, 1);
    CHECK_FALSE(r.alarmed);
    CHECK(r.days_monitored == 30);
    REQUIRE(r.cusum_trace.size() == 30);
    for (const auto& row : r.cusum_trace)
        for (double w : row) CHECK(w <= 0.0);
}

TEST_CASE("constant-rate replay matches the synthetic simulation") {
    const std::size_t K = 5;
    const std::size_t days = 400;
    std::ostringstream os;
    os << "date";
    for (std::size_t k = 0; k < K; ++k) os << ",R" << k;
    os << '\n';
    auto day0 = std::chrono::sys_days{std::chrono::year{2020} / 1 / 1};
    for (std::size_t t = 0; t < days; ++t) {
        const std::chrono::year_month_day ymd{day0 + std::chrono::days{t}};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
        os << buf;
        for (std::size_t k = 0; k < K; ++k) os << ',' << (k == 2 ? "0.05" : "0.01");
        os << '\n';
    }
    std::istringstream in(os.str());
    auto m = parse_rate_matrix(in);

    SimulationConfig c;
    c.model = ModelParams{K, 0.01, 0.05, 500, 5.0, {2}, 0};
    c.prior = PriorConfig{5.0, 495.0, 0.3};
    c.policy = AllocatorPolicy::ara();
    c.max_steps = days;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto r = replay(m, c.model, c.policy, c.prior, seed);
        auto s = run_once(c, seed);
        REQUIRE(r.alarmed);
        CHECK(*r.alarm_day == s.run_length);
        CHECK(r.alarmed_region == s.alarmed_region);
        CHECK(r.alarmed_region_name == "R" + std::to_string(*r.alarmed_region));
        CHECK(r.cusum_trace.size() == *r.alarm_day);
        if (r.alarmed_region == 2u) ++hits;
    }
    CHECK(hits >= 27);
}

TEST_CASE("replay checks dimensions and supports rounding") {
    std::istringstream in(matrix_csv(10, 3, 0.1));
    auto m = parse_rate_matrix(in);
    ModelParams wrong{4, 0.01, 0.05, 300, 6.5, {}, std::nullopt};
    CHECK_THROWS_AS(replay(m, wrong, AllocatorPolicy::even(), {1, 99, 0.3}, 1), DimensionError);
    ModelParams model{3, 0.01, 0.05, 300, 6.5, {}, std::nullopt};
    auto a = replay(m, model, AllocatorPolicy::even(), {1, 99, 0.3}, 1, {true});
    auto b = replay(m, model, AllocatorPolicy::even(), {1, 99, 0.3}, 2, {true});
    CHECK(a.cusum_trace == b.cusum_trace);
    // 100 tests at rate 0.1 give exactly 10 positives.
    CHECK(a.cusum_trace[0][0] == doctest::Approx(llr_increment(100, 10, 0.01, 0.05)));
}
