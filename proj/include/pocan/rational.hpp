#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace pocan {

using Rational = mpq_class;

/// Parses `INT/INT`, a finite decimal (`0.4`, `-1.25`) or a decimal with an
/// exponent (`1e-6`). The conversion is exact. Returns nullopt on malformed text.
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical `num/den` text, or just `num` for integers.
std::string to_string(const Rational& q);

/// Exact rational value of a finite double.
Rational from_double(double x);

double to_double(const Rational& q);

/// Largest multiple of 2^-bits that is <= q.
Rational round_down_dyadic(const Rational& q, unsigned bits);

Rational abs(const Rational& q);

/// base^exp for a non-negative integer exponent.
Rational pow(const Rational& base, unsigned long exp);

/// floor(log2(q)) for q > 0.
long floor_log2(const Rational& q);

}  // namespace pocan
