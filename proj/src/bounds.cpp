#include "pocan/bounds.hpp"

#include <mpfr.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pocan {

namespace {

constexpr mpfr_prec_t working_precision = 192;

class Mpfr {
public:
    Mpfr() { mpfr_init2(v_, working_precision); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

BoundValue to_bound(const Mpfr& x, mpfr_rnd_t rnd) {
    BoundValue out;
    long e = 0;
    out.mantissa = mpfr_get_d_2exp(&e, x.get(), rnd);
    out.exponent = e;
    // get_d_2exp may round the mantissa up to exactly 1.
    if (out.mantissa >= 1.0) {
        out.mantissa /= 2;
        out.exponent += 1;
    }
    return out;
}

// exp(-r) for rational r >= 0, rounded in direction `rnd`.
void exp_neg(Mpfr& out, const Rational& r, mpfr_rnd_t rnd) {
    // Rounding the argument the opposite way keeps the result on the safe side.
    mpfr_set_q(out.get(), r.get_mpq_t(), rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU);
    mpfr_neg(out.get(), out.get(), MPFR_RNDN);
    mpfr_exp(out.get(), out.get(), rnd);
}

Rational pow_int(const Rational& base, unsigned long e) { return pow(base, e); }

}  // namespace

BoundValue BoundValue::of(const Rational& q, bool round_up) {
    if (q <= 0) throw std::domain_error("BoundValue: value must be positive");
    Mpfr x;
    auto rnd = round_up ? MPFR_RNDU : MPFR_RNDD;
    mpfr_set_q(x.get(), q.get_mpq_t(), rnd);
    auto out = to_bound(x, rnd);
    out.exact = q;
    return out;
}

double BoundValue::log2() const { return std::log2(mantissa) + static_cast<double>(exponent); }

double BoundValue::to_double() const {
    if (exponent > 2000) return HUGE_VAL;
    if (exponent < -2000) return 0.0;
    return std::ldexp(mantissa, static_cast<int>(exponent));
}

std::string BoundValue::to_string() const {
    double d = to_double();
    std::ostringstream os;
    if (d != 0.0 && std::isfinite(d)) {
        os.precision(12);
        os << d;
    } else {
        os.precision(12);
        os << "2^" << log2();
    }
    return os.str();
}

bool operator<(const BoundValue& a, const BoundValue& b) {
    if (a.exact && b.exact) return *a.exact < *b.exact;
    if (a.exponent != b.exponent) return a.exponent < b.exponent;
    return a.mantissa < b.mantissa;
}

BoundReport hitting_bound(unsigned n, const Rational& x, std::uint64_t k) {
    if (n < 1) throw std::domain_error("hitting_bound: n must be >= 1");
    if (x <= 0 || x > 1) throw std::domain_error("hitting_bound: x must lie in (0,1]");
    if (k < n) throw std::domain_error("hitting_bound: k must be >= n");
    BoundReport r;
    r.name = "hitting";
    r.inputs = {{"n", Rational(n)}, {"x", x}, {"k", Rational(static_cast<unsigned long>(k))}};
    Rational arg = pow_int(x, n) / n * Rational(static_cast<unsigned long>(k));
    Mpfr v;
    exp_neg(v, arg, MPFR_RNDU);
    mpfr_mul_ui(v.get(), v.get(), 2, MPFR_RNDU);
    r.value = to_bound(v, MPFR_RNDU);
    r.deterministic_zero = (x == 1);
    return r;
}

AzumaTail azuma_tail(const Rational& t, const Rational& span, std::int64_t c0, std::uint64_t i) {
    if (t == 0) throw std::domain_error("azuma_tail: trend must be nonzero");
    if (span < 0) throw std::domain_error("azuma_tail: span must be non-negative");
    AzumaTail out;
    Rational d = span + abs(t) + 1;
    Rational arg = t * t / (8 * d * d);
    Mpfr a;
    exp_neg(a, arg, MPFR_RNDU);
    out.a = to_bound(a, MPFR_RNDU);
    Rational c(static_cast<long>(c0));
    out.h = t < 0 ? Rational(2 * (-span - c) / t) : Rational(2 * (span - c) / t);
    out.applicable = Rational(static_cast<unsigned long>(i)) >= out.h;
    if (out.applicable) {
        Mpfr v;
        exp_neg(v, arg * Rational(static_cast<unsigned long>(i)), MPFR_RNDU);
        out.value = to_bound(v, MPFR_RNDU);
    }
    return out;
}

DivergenceTail divergence_tail(const Rational& t, const Rational& span, std::uint64_t c0) {
    if (t <= 0) throw std::domain_error("divergence_tail: trend must be positive");
    DivergenceTail out;
    Rational d = span + t + 1;
    Rational arg = t * t / (2 * d * d);
    Mpfr a;
    exp_neg(a, arg, MPFR_RNDU);
    out.a = to_bound(a, MPFR_RNDU);
    out.threshold = 6 * d * d * d / (t * t * t);
    out.applicable = Rational(static_cast<unsigned long>(c0)) >= span;
    if (out.applicable) {
        Mpfr num;
        exp_neg(num, arg * Rational(static_cast<unsigned long>(c0)), MPFR_RNDU);
        Mpfr den;
        exp_neg(den, arg, MPFR_RNDU);
        mpfr_ui_sub(den.get(), 1, den.get(), MPFR_RNDD);
        mpfr_div(num.get(), num.get(), den.get(), MPFR_RNDU);
        out.value = to_bound(num, MPFR_RNDU);
    }
    return out;
}

Rational reach_high_bound(const Rational& span, std::uint64_t b) {
    if (b < 1) throw std::domain_error("reach_high_bound: b must be >= 1");
    return 1 / (Rational(static_cast<unsigned long>(b)) + 1 + span);
}

Rational gap_bound(const Rational& t, const Rational& span) {
    if (t <= 0) throw std::domain_error("gap_bound: trend must be positive");
    Rational d = 2 * span + 4;
    return t * t * t / (12 * d * d * d);
}

BoundValue potential_span_bound(unsigned nq, const Rational& x_min) {
    if (nq < 1) throw std::domain_error("potential_span_bound: nq must be >= 1");
    return BoundValue::of(Rational(2 * nq) / pow_int(x_min, nq));
}

std::uint64_t pumping_bound(std::uint64_t nq) { return nq * nq * (nq + 2); }

Rational perturbation_factor(const Rational& u, const Rational& v, const Rational& delta) {
    Rational f = 4 * delta * u * v;
    if (f >= 1) throw std::domain_error("perturbation_factor: 4 delta u v must be < 1");
    return f;
}

Rational visiting_delta(const Rational& eps, const Rational& r, std::uint64_t c) {
    if (r <= 0 || r > 1) throw std::domain_error("visiting_delta: r must lie in (0,1]");
    if (c < 1) throw std::domain_error("visiting_delta: c must be >= 1");
    Rational c1(static_cast<unsigned long>(c + 1));
    return eps * r * r * r / (8 * c1 * c1);
}

const char* to_string(GrandCase c) {
    switch (c) {
        case GrandCase::PrepostFinite: return "PREPOST_FINITE";
        case GrandCase::NotInBscc: return "NOT_IN_BSCC";
        case GrandCase::TrendNonzero: return "TREND_NONZERO";
    }
    return "?";
}

BoundValue grand_bound(GrandCase c, unsigned nq, const Rational& x_min, const Rational& t) {
    if (nq < 1) throw std::domain_error("grand_bound: nq must be >= 1");
    if (x_min <= 0 || x_min > 1) throw std::domain_error("grand_bound: x_min must lie in (0,1]");
    const unsigned long n = nq;
    const unsigned long n3 = n * n * n;
    switch (c) {
        case GrandCase::PrepostFinite:
            return BoundValue::of(Rational(15 * n3) / pow_int(x_min, 4 * n3));
        case GrandCase::NotInBscc:
            return BoundValue::of(Rational(5 * n) / pow_int(x_min, n + n3));
        case GrandCase::TrendNonzero: {
            if (t == 0) throw std::domain_error("grand_bound: TREND_NONZERO needs t != 0");
            Rational t4 = t * t * t * t;
            return BoundValue::of(Rational(85000UL * n3 * n3) / (pow_int(x_min, 5 * n + n3) * t4));
        }
    }
    throw std::domain_error("grand_bound: unknown case");
}

}  // namespace pocan
