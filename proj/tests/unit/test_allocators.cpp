#include <algorithm>

#include "doctest.h"

#include "aracusum/allocators.hpp"
#include "aracusum/error.hpp"

using namespace aracusum;

TEST_CASE("even allocation") {
    CHECK(even_allocate(39, 3900).counts == std::vector<Count>(39, 100));
    CHECK(even_allocate(3, 5).counts == std::vector<Count>{2, 2, 1});
    CHECK(even_allocate(4, 2).counts == std::vector<Count>{1, 1, 0, 0});
    CHECK(even_allocate(1, 9).counts == std::vector<Count>{9});
    CHECK_THROWS_AS(even_allocate(0, 9), DomainError);
}

TEST_CASE("top-r allocation") {
    std::vector<double> w(39);
    for (std::size_t k = 0; k < 39; ++k) w[k] = static_cast<double>((k * 17) % 39);
    auto a = topr_allocate(w, 3900, 20, 20);
    CHECK(a.total() == 3900);
    std::vector<std::size_t> order(39);
    for (std::size_t k = 0; k < 39; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return w[x] > w[y]; });
    for (std::size_t r = 0; r < 39; ++r) CHECK(a.counts[order[r]] == (r < 20 ? 195 : 0));

    // Ties go to the lowest index; extra batches wrap round the selected regions.
    auto t = topr_allocate(std::vector<double>{1, 3, 3, 0}, 12, 4, 2);
    CHECK(t.counts == std::vector<Count>{0, 6, 6, 0});
    auto z = topr_allocate(std::vector<double>(5, 0.0), 10, 5, 3);
    CHECK(z.counts == std::vector<Count>{4, 4, 2, 0, 0});

    CHECK_THROWS_AS(topr_allocate(w, 3901, 20, 20), DomainError);
    CHECK_THROWS_AS(topr_allocate(w, 3900, 20, 40), DomainError);
    CHECK_THROWS_AS(topr_allocate(w, 3900, 0, 20), DomainError);
}

TEST_CASE("policy names") {
    CHECK(parse_policy_kind("ara") == PolicyKind::Ara);
    CHECK(parse_policy_kind("proposed") == PolicyKind::Ara);
    CHECK(parse_policy_kind("even") == PolicyKind::Even);
    CHECK(parse_policy_kind("top-r") == PolicyKind::TopR);
    CHECK(to_string(PolicyKind::TopR) == "topr");
    CHECK_THROWS_AS(parse_policy_kind("random"), ConfigError);
}

TEST_CASE("allocate dispatches on policy") {
    const PriorConfig prior{19.5, 1930.5, 0.3};
    const auto post = posterior_init(prior, 39);
    auto w = CusumState::zeros(39);
    w.stats[5] = 2.0;
    CHECK(allocate(AllocatorPolicy::ara(), w, post, 3900).counts == std::vector<Count>(39, 100));
    CHECK(allocate(AllocatorPolicy::even(), w, post, 3900).counts == std::vector<Count>(39, 100));
    auto t = allocate(AllocatorPolicy::topr(20, 20), w, post, 3900);
    CHECK(t.counts[5] == 195);
    CHECK(t.counts[0] == 195);
    CHECK(t.counts[38] == 0);
}
