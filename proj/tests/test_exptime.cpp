#include "pocan/errors.hpp"
#include "pocan/exptime.hpp"
#include "pocan/reach.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace pocan;

TEST_CASE("finiteness verdicts") {
    auto sym = fixtures::symmetric_walk();
    auto fin = classify_finiteness(sym, positive_pairs(sym));
    REQUIRE(fin.pairs.size() == 1);
    CHECK(fin.pairs[0].verdict == Verdict::Infinite);
    CHECK(fin.pairs[0].reason == FinitenessReason::TrendZeroPrepostInfinite);

    auto walk = fixtures::walk(Rational(2, 5));
    auto fw = classify_finiteness(walk, positive_pairs(walk));
    REQUIRE(fw.pairs.size() == 1);
    CHECK(fw.pairs[0].verdict == Verdict::Finite);
    CHECK(fw.pairs[0].reason == FinitenessReason::BsccTrendNonzero);

    auto ao = and_or_model(Rational(1, 2), Rational(2, 5), Rational(1, 5), Rational(1, 5));
    auto fa = classify_finiteness(ao, positive_pairs(ao));
    CHECK_FALSE(fa.pairs.empty());
    for (const auto& v : fa.pairs) CHECK(v.verdict == Verdict::Finite);
}

TEST_CASE("trend zero with a finite corridor") {
    // p steps down to q; q alternates +1/-1 deterministically through r, so the
    // trend is 0 but the honest paths from p(1) to q(0) are bounded.
    Poc m({"p", "q", "r"},
          {{0, 0, 0, Rational(1)}, {1, 0, 1, Rational(1)}, {2, 0, 2, Rational(1)}},
          {{0, -1, 1, Rational(1)}, {1, 1, 2, Rational(1)}, {2, -1, 1, Rational(1)}});
    auto fin = classify_finiteness(m, positive_pairs(m));
    auto v = fin.find(0, 1);
    REQUIRE(v != nullptr);
    CHECK(v->verdict == Verdict::Finite);
    CHECK(v->reason == FinitenessReason::TrendZeroPrepostFinite);
    auto rep = expected_times(m, Rational(1, 1000));
    CHECK(rep.value(0, 1).value() == doctest::Approx(1.0));
}

TEST_CASE("instantiated expectation system for the down-biased walk") {
    auto m = fixtures::walk(Rational(2, 5));
    auto terms = solve_termination(m, Rational(1, 1000000));
    auto sys = build_exp_system(m, {{0, 0}}, terms);
    REQUIRE(sys.variables.size() == 1);
    CHECK(sys.rhs[0] == 1);
    CHECK(std::abs(sys.g(0, 0).get_d() - 4.0 / 5) < 1e-6);
}

TEST_CASE("down-only model takes one step") {
    auto rep = expected_times(fixtures::down_only(), Rational(1, 1000000));
    CHECK(rep.value(0, 0).value() == doctest::Approx(1.0));
}

TEST_CASE("walk expectations match the closed form in both modes") {
    for (auto u : {Rational(2, 5), Rational(1, 3)}) {
        auto m = fixtures::walk(u);
        double expect = 1.0 / (1 - 2 * u.get_d());
        auto a = expected_times(m, Rational(1, 1000000));
        CHECK(std::abs(a.value(0, 0).value() - expect) <= 1e-6);
        auto r = expected_times(m, Rational(1, 1000000), ExpMode::Rigorous);
        CHECK(std::abs(r.value(0, 0).value() - expect) <= 1e-6);
        CHECK(std::abs(a.value(0, 0).value() - r.value(0, 0).value()) <= 2e-6);
        CHECK(exp_upper_bound(m).to_double() >= expect);
    }
}

TEST_CASE("AND-OR expectations") {
    auto row1 = and_or_model(Rational(1, 2), Rational(2, 5), Rational(1, 5), Rational(1, 5));
    auto r1 = expected_times(row1, Rational(1, 1000));
    CHECK(std::abs(r1.value(0, 5).value() - 11.000) < 1e-2);
    CHECK(std::abs(r1.value(0, 4).value() - 7.667) < 1e-2);
    for (const auto& v : r1.values) CHECK(v.value >= 1.0);
    CHECK_THROWS_AS(expected_times(row1, Rational(1, 1000), ExpMode::Rigorous), PrecisionError);

    auto hard = and_or_model(Rational(1, 2), Rational(1, 2), Rational(3, 10), Rational(1, 10));
    auto r2 = expected_times(hard, Rational(1, 1000));
    CHECK(std::abs(r2.value(0, 5).value() - 83.199) < 1e-2);
    CHECK(std::abs(r2.value(0, 4).value() - 111.801) < 1e-2);
}

TEST_CASE("no finite pairs needs no solve") {
    auto rep = expected_times(fixtures::symmetric_walk(), Rational(1, 1000));
    CHECK(rep.values.empty());
    CHECK(rep.finiteness.pairs.size() == 1);
    CHECK_FALSE(rep.value(0, 0));
}
