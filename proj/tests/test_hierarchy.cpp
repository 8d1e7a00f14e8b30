#include "grace/hierarchy.hpp"

#include <cmath>

#include "doctest.h"
#include "grace/error.hpp"
#include "grace/rng.hpp"
#include "oracles.hpp"

using namespace grace;
using grace::testing::brute_force_expected_utility;
using grace::testing::random_probabilities;

namespace {

SatisfactionPattern pattern_from_mask(int n, std::size_t mask) {
    SatisfactionPattern p;
    p.bits.resize(n);
    for (int i = 0; i < n; ++i) {
        p.bits[i] = (mask >> i) & 1u;
    }
    return p;
}

}

using Per = std::vector<std::vector<double>>;

TEST_CASE("rank: table values") {
    CHECK(rank({{true, true, true}}) == 1);
    CHECK(rank({{false, false, false}}) == 8);
    CHECK(rank({{true, false, true}}) == 3); // 8 - (4 + 0 + 1)
}

TEST_CASE("rank: size limits") {
    CHECK_THROWS_AS(rank(SatisfactionPattern{}), DomainError);
    SatisfactionPattern too_big;
    too_big.bits.resize(63, true);
    CHECK_THROWS_AS(rank(too_big), DomainError);
    SatisfactionPattern at_limit;
    at_limit.bits.resize(62, true);
    CHECK(rank(at_limit) == 1);
    at_limit.bits.assign(62, false);
    CHECK(rank(at_limit) == std::int64_t{1} << 62);
}

TEST_CASE("utility: shifted rank") {
    CHECK(utility({{true, true, true}}) == 8);
    CHECK(utility({{false, false, false}}) == 1);
    CHECK(utility({{true, false, true}}) == 6); // 4 + 0 + 1 + 1
}

TEST_CASE("rank/utility: exhaustive structural properties for N <= 8") {
    for (int n = 1; n <= 8; ++n) {
        const std::size_t total = std::size_t{1} << n;
        std::vector<std::int64_t> ranks(total);
        std::vector<bool> seen(total + 1, false);
        for (std::size_t mask = 0; mask < total; ++mask) {
            const auto p = pattern_from_mask(n, mask);
            ranks[mask] = rank(p);
            // Rank preservation: u = 2^N - r + 1 exactly.
            CHECK(utility(p) == (std::int64_t{1} << n) - ranks[mask] + 1);
            // Bijection part 1: in range, not repeated.
            REQUIRE(ranks[mask] >= 1);
            REQUIRE(ranks[mask] <= static_cast<std::int64_t>(total));
            CHECK(!seen[static_cast<std::size_t>(ranks[mask])]);
            seen[static_cast<std::size_t>(ranks[mask])] = true;
        }
        // Lexicographic dominance: patterns agreeing on all higher-priority
        // bits, one with bit i set, one clear; the set one wins regardless
        // of how the lower-priority bits differ.
        for (int i = 0; i < n; ++i) {
            const int n_low = n - 1 - i;
            for (std::size_t high = 0; high < (std::size_t{1} << i); ++high) {
                for (std::size_t la = 0; la < (std::size_t{1} << n_low); ++la) {
                    for (std::size_t lb = 0; lb < (std::size_t{1} << n_low); ++lb) {
                        const std::size_t a = high | (std::size_t{1} << i) | (la << (i + 1));
                        const std::size_t b = high | (lb << (i + 1));
                        if (ranks[a] >= ranks[b]) {
                            FAIL_CHECK("dominance violated at n=" << n << " i=" << i);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("expected_utility: closed forms") {
    CHECK(expected_utility(RuleProbabilities::from_rule_products({1.0, 1.0})) ==
          doctest::Approx(-1.0));
    CHECK(expected_utility(RuleProbabilities::from_rule_products({0.0, 0.0})) ==
          doctest::Approx(-4.0));
    CHECK(expected_utility(RuleProbabilities::from_rule_products({0.5, 0.5})) ==
          doctest::Approx(-2.5));
}

TEST_CASE("expected_utility: domain checks") {
    CHECK_THROWS_AS(expected_utility(RuleProbabilities::from_rule_products({1.2})),
                    DomainError);
    CHECK_THROWS_AS(expected_utility(RuleProbabilities::from_rule_products({-0.1, 0.5})),
                    DomainError);
}

TEST_CASE("expected_utility: matches brute-force enumeration") {
    Prng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.index(10));
        const RuleProbabilities probs = random_probabilities(rng, n);
        const double analytic = expected_utility(probs);
        const double enumerated = brute_force_expected_utility(probs);
        CHECK(std::abs(analytic - enumerated) <= 1e-12);
        CHECK(analytic <= -1.0 + 1e-12);
        CHECK(analytic >= -std::ldexp(1.0, n) - 1e-12);
    }
}

TEST_CASE("expected_utility: partial derivative in q_i is exactly 2^(N-i)") {
    // Dyadic probabilities keep every term exactly representable.
    for (int n = 1; n <= 8; ++n) {
        Prng rng(n);
        for (int i = 0; i < n; ++i) {
            std::vector<double> q(n);
            for (int j = 0; j < n; ++j) {
                q[j] = 0.5 * static_cast<double>(rng.index(3)); // 0, 0.5, 1
            }
            q[i] = 0.0;
            const double at0 = expected_utility(RuleProbabilities::from_rule_products(q));
            q[i] = 1.0;
            const double at1 = expected_utility(RuleProbabilities::from_rule_products(q));
            CHECK(at1 - at0 == std::ldexp(1.0, n - 1 - i));
        }
    }
}

TEST_CASE("expected_utility: nondecreasing in each q_i") {
    Prng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(6));
        std::vector<double> q(n);
        for (auto& v : q) v = rng.uniform01();
        const double base = expected_utility(RuleProbabilities::from_rule_products(q));
        for (int i = 0; i < n; ++i) {
            auto bumped = q;
            bumped[i] = std::min(1.0, bumped[i] + 0.25);
            CHECK(expected_utility(RuleProbabilities::from_rule_products(bumped)) >=
                  base - 1e-15);
        }
    }
}

TEST_CASE("log_lower_bound: closed forms") {
    const RuleProbabilities single(Per{{0.5}});
    CHECK(log_lower_bound(single) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    // Single rule, single criterion: exp(L) equals the shifted utility.
    CHECK(std::exp(log_lower_bound(single)) ==
          doctest::Approx(expected_utility(single) + 2.0).epsilon(1e-12));

    const RuleProbabilities all_one(Per{{1.0, 1.0}, {1.0}});
    CHECK(log_lower_bound(all_one) == 0.0);

    const RuleProbabilities two(Per{{0.5}, {0.5}});
    CHECK(log_lower_bound(two) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("log_lower_bound: clamps zero probabilities") {
    const RuleProbabilities zero(Per{{0.0}});
    CHECK(std::isfinite(log_lower_bound(zero)));
    CHECK(log_lower_bound(zero) == doctest::Approx(std::log(1e-12)));
}

TEST_CASE("log_lower_bound: exp(L) <= U + 2^N over random instances") {
    Prng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.index(6));
        const RuleProbabilities probs = random_probabilities(rng, n, 3, 0.01, 1.0);
        const double bound = std::exp(log_lower_bound(probs));
        const double shifted = expected_utility(probs) + std::ldexp(1.0, n);
        CHECK(bound <= shifted + 1e-12);
    }
}

TEST_CASE("monte_carlo_utility: degenerate and statistical cases") {
    const auto certain = monte_carlo_utility(RuleProbabilities::from_rule_products({1.0, 1.0}),
                                             1000, 42);
    CHECK(certain.mean == -1.0);
    CHECK(certain.std_err == 0.0);

    const auto hopeless = monte_carlo_utility(RuleProbabilities::from_rule_products({0.0, 0.0}),
                                              500, 42);
    CHECK(hopeless.mean == -4.0);
    CHECK(hopeless.std_err == 0.0);

    const RuleProbabilities half = RuleProbabilities::from_rule_products({0.5, 0.5});
    const auto est = monte_carlo_utility(half, 100000, 42);
    CHECK(std::abs(est.mean - (-2.5)) <= 3.0 * est.std_err);
    CHECK(est.std_err > 0.0);

    CHECK_THROWS_AS(monte_carlo_utility(half, 0, 1), DomainError);
    // Deterministic for a fixed seed.
    const auto again = monte_carlo_utility(half, 1000, 9);
    const auto again2 = monte_carlo_utility(half, 1000, 9);
    CHECK(again.mean == again2.mean);
    CHECK(again.std_err == again2.std_err);
}

TEST_CASE("hierarchy: construction rules") {
    CHECK_THROWS_AS(RuleHierarchy({}), DomainError);
    CHECK_THROWS_AS(RuleHierarchy({{"a"}, {}}), DomainError);
    const RuleHierarchy h = RuleHierarchy::standard();
    REQUIRE(h.size() == 3);
    CHECK(h.rule(1).criteria == std::vector<std::string>{"stability"});
    CHECK(h.rule(2).criteria == std::vector<std::string>{"execution", "collision"});
    CHECK(h.rule(3).criteria == std::vector<std::string>{"intention"});
    for (int i = 1; i <= h.size(); ++i) {
        CHECK(h.rule(i).priority == i);
    }
}

TEST_CASE("rule probabilities: products and groupings") {
    const RuleProbabilities probs(Per{{0.5, 0.8}, {0.25}});
    CHECK(probs.rule_product(1) == doctest::Approx(0.4));
    CHECK(probs.rule_product(2) == doctest::Approx(0.25));
    CHECK(probs.rule_products().size() == 2);
}
