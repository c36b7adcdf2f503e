#pragma once

#include "pocan/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pocan {

/// Positive number in log-space: mantissa * 2^exponent with mantissa in
/// [1/2, 1). Rational-valued bounds also keep the exact value.
struct BoundValue {
    std::optional<Rational> exact;
    double mantissa = 0.5;
    long exponent = 1;

    static BoundValue of(const Rational& q, bool round_up = true);

    double log2() const;
    /// Overflows to inf / underflows to 0 outside the double range.
    double to_double() const;
    std::string to_string() const;
};

bool operator<(const BoundValue& a, const BoundValue& b);

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, Rational>> inputs;
    BoundValue value;
    bool applicable = true;
    bool deterministic_zero = false;
};

/// 2 c^k with c = exp(-x^n / n), rounded up. Flags x = 1, where the true
/// probability is 0 once k >= n.
BoundReport hitting_bound(unsigned n, const Rational& x, std::uint64_t k);

struct AzumaTail {
    BoundValue a;        // exp(-t^2 / (8 (span + |t| + 1)^2)), rounded up
    Rational h;          // the bound applies for i >= h
    bool applicable = false;
    BoundValue value;    // a^i when applicable
};

AzumaTail azuma_tail(const Rational& t, const Rational& span, std::int64_t c0, std::uint64_t i);

struct DivergenceTail {
    BoundValue a;          // exp(-t^2 / (2 (span + t + 1)^2)), rounded up
    Rational threshold;    // c0 >= threshold gives termination probability <= 1/2
    bool applicable = false;
    BoundValue value;      // a^c0 / (1 - a)
};

DivergenceTail divergence_tail(const Rational& t, const Rational& span, std::uint64_t c0);

/// 1 / (b + 1 + span).
Rational reach_high_bound(const Rational& span, std::uint64_t b);

/// t^3 / (12 (2 span + 4)^3).
Rational gap_bound(const Rational& t, const Rational& span);

/// 2 nq / x_min^nq.
BoundValue potential_span_bound(unsigned nq, const Rational& x_min);

/// nq^2 (nq + 2).
std::uint64_t pumping_bound(std::uint64_t nq);

/// 4 delta u v; throws std::domain_error unless it is < 1.
Rational perturbation_factor(const Rational& u, const Rational& v, const Rational& delta);

/// eps r^3 / (8 (c + 1)^2).
Rational visiting_delta(const Rational& eps, const Rational& r, std::uint64_t c);

enum class GrandCase { PrepostFinite, NotInBscc, TrendNonzero };

const char* to_string(GrandCase c);

BoundValue grand_bound(GrandCase c, unsigned nq, const Rational& x_min, const Rational& t = Rational(0));

}  // namespace pocan
