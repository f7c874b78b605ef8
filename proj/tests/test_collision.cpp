#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nxsift/collision.hpp"

using namespace nxsift;

TEST_CASE("classic birthday point") {
    const double p = p_t_collision(365, 23, 2).p;
    CHECK(p == doctest::Approx(0.507).epsilon(0.04));
    // independent routes agree
    CHECK(std::abs(p - exact_birthday_probability(365, 23)) < 0.01);
    const double mc = monte_carlo_oracle(365, 2, 23, 1000000, 1234);
    CHECK(mc == doctest::Approx(0.5073).epsilon(0.006));
    CHECK(std::abs(p - mc) < 0.02);
}

TEST_CASE("degenerate regimes") {
    CHECK(p_t_collision(100, 1, 2).p == 0.0);
    CHECK(p_t_collision(100, 0, 2).p == 0.0);
    CHECK(p_t_collision(50, 2, 3).p == 0.0);  // n < t
    CHECK(p_t_collision(1, 2, 2).p == 1.0);   // pigeonhole
    const TCollisionProb saturated = p_t_collision(10, 31, 2);
    CHECK(saturated.p == 1.0);
    CHECK(saturated.approximation_saturated);
    CHECK_THROWS_AS(p_t_collision(0, 5, 2), std::invalid_argument);
    CHECK_THROWS_AS(p_t_collision(10, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(p_t_collision(10, -1, 2), std::invalid_argument);
}

TEST_CASE("monte carlo oracle sanity") {
    CHECK(monte_carlo_oracle(1, 2, 2, 1000, 7) == 1.0);
    CHECK(monte_carlo_oracle(1000000, 2, 2, 100000, 7) <= 0.001);
    CHECK_THROWS_AS(monte_carlo_oracle(10, 2, 5, 0, 7), std::invalid_argument);
}

TEST_CASE("approximation tracks the oracle for the pizd-scale dictionary") {
    // 384 words, three strikes
    const long L = 384;
    const int t = 3;
    const long n_max = 100;
    const std::vector<double> cdf = monte_carlo_cdf(L, t, n_max, 100000, 99);
    for (long n = 10; n <= n_max; n += 5) {
        const double approx = p_t_collision(L, n, t).p;
        CHECK(std::abs(approx - cdf[static_cast<size_t>(n - 1)]) <= 0.05);
    }
}

TEST_CASE("approximation vs exact product across dictionary sizes") {
    // the closed form tightens as L grows: ~0.06 worst case at L=50,
    // inside 0.02 from a few hundred words up
    for (long L : {50L, 100L, 365L, 1000L, 5000L}) {
        const double envelope = L >= 365 ? 0.022 : 0.07;
        for (long n = 2; n <= L; ++n) {
            const double approx = p_t_collision(L, n, 2).p;
            const double exact = exact_birthday_probability(L, n);
            CHECK(std::abs(approx - exact) <= envelope);
        }
    }
}

TEST_CASE("monotonic in n, antitone in L and t") {
    for (long L : {100L, 384L}) {
        double prev = -1.0;
        for (long n = 0; n <= 3 * L; n += 3) {
            const double p = p_t_collision(L, n, 3).p;
            CHECK(p >= prev);
            prev = p;
        }
    }
    for (long n : {20L, 50L, 120L}) {
        CHECK(p_t_collision(100, n, 2).p >= p_t_collision(200, n, 2).p);
        CHECK(p_t_collision(100, n, 2).p >= p_t_collision(100, n, 3).p);
    }
}

TEST_CASE("multi-dictionary composition") {
    SUBCASE("single dictionary reduces to the base case") {
        CollisionParams params{{384}, 3};
        const AnyDictionaryProb p = p_any_dictionary(params, 40);
        CHECK(p.sum_form == doctest::Approx(p_t_collision(384, 40, 3).p));
        CHECK(p.product_form == doctest::Approx(p.sum_form).epsilon(1e-9));
    }
    SUBCASE("equal sizes double the sum form") {
        CollisionParams params{{500, 500}, 2};
        const double single = p_t_collision(500, 15, 2).p;
        const AnyDictionaryProb p = p_any_dictionary(params, 15);
        CHECK(p.sum_form == doctest::Approx(std::min(1.0, 2 * single)));
        CHECK(p.product_form == doctest::Approx(1 - (1 - single) * (1 - single)));
    }
    SUBCASE("sum form clamps at one") {
        CollisionParams params{{10, 10, 10}, 2};
        CHECK(p_any_dictionary(params, 10).sum_form == 1.0);
    }
    SUBCASE("nymaim2-scale dictionaries vs a joint simulation") {
        // draws hit both dictionaries each round; a t-collision in either counts
        CollisionParams params{{2450, 4387}, 3};
        const long n_probe = 250;
        const std::vector<double> cdf1 = monte_carlo_cdf(2450, 3, n_probe, 30000, 5);
        const std::vector<double> cdf2 = monte_carlo_cdf(4387, 3, n_probe, 30000, 6);
        for (long n = 50; n <= n_probe; n += 50) {
            const double joint_mc = 1 - (1 - cdf1[static_cast<size_t>(n - 1)]) *
                                            (1 - cdf2[static_cast<size_t>(n - 1)]);
            const AnyDictionaryProb p = p_any_dictionary(params, n);
            CHECK(std::abs(p.product_form - joint_mc) <= 0.05);
        }
    }
    SUBCASE("invalid params") {
        CollisionParams empty{{}, 2};
        CHECK_THROWS_AS(p_any_dictionary(empty, 5), std::invalid_argument);
        CollisionParams bad_t{{10}, 1};
        CHECK_THROWS_AS(p_any_dictionary(bad_t, 5), std::invalid_argument);
    }
}

TEST_CASE("threshold planning") {
    SUBCASE("classic birthday") {
        const long n = n_for_probability(365, 2, 0.5);
        CHECK(n >= 22);
        CHECK(n <= 24);
    }
    SUBCASE("single-word dictionary") {
        CHECK(n_for_probability(1, 2, 0.99) == 2);
    }
    SUBCASE("pizd-scale sqrt heuristic") {
        const long n = n_for_probability(384, 2, 0.5);
        CHECK(std::abs(n - 23) <= 2);  // ~1.18 sqrt(384)
    }
    SUBCASE("planner consistency") {
        for (long L : {100L, 384L, 2450L}) {
            for (int t : {2, 3, 4}) {
                const long n = n_for_probability(L, t, 0.5);
                CHECK(p_t_collision(L, n, t).p >= 0.5);
                if (n > t) CHECK(p_t_collision(L, n - 1, t).p < 0.5);
            }
        }
    }
    SUBCASE("invalid target") {
        CHECK_THROWS_AS(n_for_probability(100, 2, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(n_for_probability(100, 2, 0.0), std::invalid_argument);
    }
}

TEST_CASE("oracle is deterministic per seed and reports the known value") {
    const double a = monte_carlo_oracle(365, 2, 23, 50000, 42);
    const double b = monte_carlo_oracle(365, 2, 23, 50000, 42);
    CHECK(a == b);
    const double c = monte_carlo_oracle(365, 2, 23, 50000, 43);
    CHECK(a != c);  // different stream, almost surely
    CHECK(a == doctest::Approx(exact_birthday_probability(365, 23)).epsilon(0.02));
}
