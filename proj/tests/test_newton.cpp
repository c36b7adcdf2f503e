#include "pocan/newton.hpp"
#include "pocan/reach.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace pocan;

TEST_CASE("termination system of the symmetric walk") {
    auto m = fixtures::symmetric_walk();
    auto sys = build_term_system(m, positive_pairs(m));
    REQUIRE(sys.variables.size() == 1);
    const auto& eq = sys.equations[0];
    CHECK(eq.constant == Rational(1, 2));
    CHECK(eq.linear.empty());
    REQUIRE(eq.bilinear.size() == 1);
    CHECK(eq.bilinear[0].coef == Rational(1, 2));
    CHECK(residual(sys, std::vector<Rational>{Rational(0)}) == Rational(1, 2));
}

TEST_CASE("down-only model solves to exactly one") {
    auto m = fixtures::down_only();
    auto sys = build_term_system(m, positive_pairs(m));
    CHECK(residual(sys, std::vector<Rational>{Rational(1)}) == 0);
    auto sol = solve_termination(m, Rational(1, 1000000));
    CHECK(sol.value(0, 0) == 1.0);
}

TEST_CASE("biased walks match gambler's ruin") {
    for (auto [u, d] : {std::pair{Rational(2, 5), Rational(3, 5)}, {Rational(1, 3), Rational(2, 3)},
                        {Rational(3, 5), Rational(2, 5)}}) {
        auto m = fixtures::walk(u);
        double expect = std::min(1.0, Rational(d / u).get_d());
        for (auto backend : {Backend::Float64, Backend::ExactRational}) {
            auto sol = solve_termination(m, Rational(1, 1000000000), {backend});
            CHECK(std::abs(sol.value(0, 0) - expect) <= 1e-8 * expect);
            CHECK(sol.value(0, 0) <= expect + 1e-15);
        }
    }
}

TEST_CASE("symmetric walk converges despite the singular derivative") {
    auto m = fixtures::symmetric_walk();
    auto sol = solve_termination(m, Rational(1, 1000000));
    CHECK(sol.value(0, 0) >= 1 - 1e-6);
    CHECK(sol.value(0, 0) <= 1.0);
    auto exact = solve_termination(m, Rational(1, 1000000), {Backend::ExactRational});
    CHECK(exact.exact_value(0, 0) >= Rational(999999, 1000000));
    CHECK(exact.exact_value(0, 0) <= 1);
}

TEST_CASE("AND-OR row 1 termination probabilities") {
    auto m = and_or_model(Rational(1, 2), Rational(2, 5), Rational(1, 5), Rational(1, 5));
    auto sol = solve_termination(m, Rational(1, 1000000));
    CHECK(std::abs(sol.value(0, 5) - 0.5) < 5e-4);
    CHECK(std::abs(sol.value(0, 4) - 0.3) < 5e-4);
    CHECK(sol.backend == Backend::Float64);
    CHECK(sol.residual <= 1e-12);
    CHECK(sol.value(0, 0) == 0.0);
    CHECK_FALSE(sol.positive(0, 0));
}

TEST_CASE("Newton agrees with value iteration on random models") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        auto m = fixtures::random_poc(rng, {5, false, 0});
        const Rational eps(1, 1000000);
        auto sol = solve_termination(m, eps);
        auto kl = fixtures::kleene_termination(m, 4000);
        auto kl2 = fixtures::kleene_termination(m, 8000);
        const auto n = m.num_states();
        for (StateId p = 0; p < n; ++p) {
            double total = 0;
            for (StateId q = 0; q < n; ++q) {
                total += sol.value(p, q);
                // Both under-approximate; Kleene may still be short of the limit.
                CHECK(kl2[p][q] <= sol.value(p, q) * (1 + 2e-6) + 1e-12);
                if (std::abs(kl2[p][q] - kl[p][q]) < 1e-13) {
                    CHECK(std::abs(sol.value(p, q) - kl2[p][q]) <= 2e-6 * kl2[p][q] + 1e-12);
                }
                if (!sol.positive(p, q)) CHECK(kl[p][q] == 0.0);
                if (sol.positive(p, q)) {
                    double floor = std::pow(m.x_min().get_d(), static_cast<double>(n * n * n));
                    CHECK(sol.value(p, q) >= floor * (1 - 1e-6));
                }
            }
            CHECK(total <= 1 + n * 1e-6);
        }
    }
}

TEST_CASE("invalid tolerance is rejected") {
    auto m = fixtures::down_only();
    CHECK_THROWS_AS(solve_termination(m, Rational(0)), std::invalid_argument);
    CHECK_THROWS_AS(solve_termination(m, Rational(1)), std::invalid_argument);
}
