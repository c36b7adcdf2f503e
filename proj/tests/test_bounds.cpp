#include "pocan/bounds.hpp"

#include <doctest.h>

#include <cmath>

using namespace pocan;

namespace {

// The stored value must round the true value up (or down) and stay within a
// few ulps of it.
void check_up(const BoundValue& v, long double truth) {
    const long double got = v.to_double();
    CHECK(got >= truth * (1 - 1e-18L));
    CHECK(got <= truth * (1 + 4e-16L));
}

void check_down(const BoundValue& v, long double truth) {
    const long double got = v.to_double();
    CHECK(got <= truth * (1 + 1e-18L));
    CHECK(got >= truth * (1 - 4e-16L));
}

}  // namespace

TEST_CASE("log-space values") {
    auto v = BoundValue::of(Rational(5));
    CHECK(v.exact.value() == 5);
    CHECK(v.mantissa == doctest::Approx(0.625));
    CHECK(v.exponent == 3);
    CHECK(v.log2() == doctest::Approx(std::log2(5.0)));
    CHECK(v.to_double() == 5.0);

    Rational huge(1);
    mpq_mul_2exp(huge.get_mpq_t(), huge.get_mpq_t(), 5000);
    auto h = BoundValue::of(huge * 3);
    CHECK(h.log2() == doctest::Approx(5000 + std::log2(3.0)));
    CHECK(std::isinf(h.to_double()));
    CHECK(BoundValue::of(Rational(1, 3)) < BoundValue::of(Rational(1, 2)));
    CHECK_FALSE(BoundValue::of(huge) < BoundValue::of(Rational(2)));

    for (double x : {1e-300, 0.1, 1.0, 7.5, 1e300}) {
        auto b = BoundValue::of(from_double(x));
        CHECK(b.log2() == doctest::Approx(std::log2(x)).epsilon(1e-15));
        CHECK(b.to_double() >= x);
        CHECK(b.to_double() <= std::nextafter(x, 2 * x));
    }
}

TEST_CASE("hitting bound") {
    auto r = hitting_bound(2, Rational(1, 2), 2);
    check_up(r.value, 2 * std::exp(-0.25L));
    CHECK_FALSE(r.deterministic_zero);
    CHECK(hitting_bound(3, Rational(1), 3).deterministic_zero);
    auto prev = hitting_bound(2, Rational(1, 2), 2).value;
    for (std::uint64_t k = 3; k < 20; ++k) {
        auto cur = hitting_bound(2, Rational(1, 2), k).value;
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(hitting_bound(3, Rational(1, 2), 2), std::domain_error);
}

TEST_CASE("Azuma tail") {
    auto a = azuma_tail(Rational(1, 5), Rational(0), 1, 1);
    check_up(a.a, std::exp(-1.0L / 288));
    CHECK(a.h == -10);
    CHECK(a.applicable);
    check_up(a.value, std::exp(-1.0L / 288));

    auto neg = azuma_tail(Rational(-1, 5), Rational(2), 1, 5);
    CHECK(neg.h == 30);
    CHECK_FALSE(neg.applicable);
    CHECK(azuma_tail(Rational(-1, 5), Rational(2), 1, 30).applicable);

    for (auto t : {Rational(1, 3), Rational(-2, 7), Rational(1)}) {
        for (auto s : {Rational(0), Rational(5, 2)}) {
            double av = azuma_tail(t, s, 0, 100).a.to_double();
            CHECK(av > 0);
            CHECK(av < 1);
        }
    }
    CHECK(azuma_tail(Rational(1, 5), Rational(0), 1, 9).value < azuma_tail(Rational(1, 5), Rational(0), 1, 8).value);
    CHECK_THROWS_AS(azuma_tail(Rational(0), Rational(0), 1, 1), std::domain_error);
}

TEST_CASE("divergence tail") {
    auto d = divergence_tail(Rational(1, 5), Rational(0), 1296);
    CHECK(d.threshold == 1296);
    CHECK(d.applicable);
    const long double a = std::exp(-(1.0L / 25) / (2 * (36.0L / 25)));
    check_up(d.a, a);
    check_up(d.value, std::pow(a, 1296) / (1 - a));
    CHECK(d.value.to_double() <= 0.5);
    CHECK(divergence_tail(Rational(1, 5), Rational(0), 11).value < divergence_tail(Rational(1, 5), Rational(0), 10).value);
    CHECK_FALSE(divergence_tail(Rational(1, 5), Rational(3), 2).applicable);
    CHECK_THROWS_AS(divergence_tail(Rational(-1, 5), Rational(0), 3), std::domain_error);
}

TEST_CASE("rational bounds") {
    CHECK(reach_high_bound(Rational(0), 1) == Rational(1, 2));
    CHECK(reach_high_bound(Rational(2), 3) == Rational(1, 6));
    CHECK(gap_bound(Rational(1, 5), Rational(0)) == Rational(1, 96000));
    CHECK(gap_bound(Rational(1), Rational(0)) <= 1);
    CHECK_THROWS_AS(gap_bound(Rational(0), Rational(1)), std::domain_error);
    CHECK(potential_span_bound(1, Rational(1)).exact.value() == 2);
    CHECK(potential_span_bound(6, Rational(1, 5)).exact.value() == 187500);
    CHECK(pumping_bound(1) == 3);
    CHECK(pumping_bound(6) == 288);
    CHECK(perturbation_factor(3, 5, Rational(1, 120)) == Rational(1, 2));
    CHECK_THROWS_AS(perturbation_factor(3, 5, Rational(1, 60)), std::domain_error);
    CHECK(visiting_delta(Rational(1, 10), Rational(1), 1) == Rational(1, 320));
    CHECK(visiting_delta(Rational(1, 10), Rational(1, 2), 1) < visiting_delta(Rational(1, 10), Rational(1), 1));
}

TEST_CASE("grand bounds") {
    CHECK(grand_bound(GrandCase::NotInBscc, 1, Rational(1)).exact.value() == 5);
    CHECK(grand_bound(GrandCase::TrendNonzero, 1, Rational(1), Rational(1, 5)).exact.value() == 53125000);
    CHECK(grand_bound(GrandCase::PrepostFinite, 1, Rational(1)).exact.value() == 15);
    CHECK(grand_bound(GrandCase::PrepostFinite, 2, Rational(1, 2)).exact.value() == Rational(120) * pow(Rational(2), 32));
    auto big = grand_bound(GrandCase::PrepostFinite, 6, Rational(1, 5));
    CHECK(big.log2() == doctest::Approx(std::log2(15.0 * 216) + 4 * 216 * std::log2(5.0)));
    CHECK_THROWS_AS(grand_bound(GrandCase::TrendNonzero, 1, Rational(1)), std::domain_error);
}

TEST_CASE("directed rounding of exp") {
    // a = exp(-1/288) rounded up and the lower-bound style value rounded down
    // bracket the true value.
    auto up = azuma_tail(Rational(1, 5), Rational(0), 1, 1).a;
    CHECK(static_cast<long double>(up.to_double()) >= std::exp(-1.0L / 288) * (1 - 1e-18L));
    check_down(BoundValue::of(Rational(1, 3), false), 1.0L / 3);
    check_up(BoundValue::of(Rational(1, 3), true), 1.0L / 3);
}
