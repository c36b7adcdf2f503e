#include "pocan/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pocan {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    Rational result;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        mpz_class d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        result = Rational(mpz_class(std::string(num), 10), d);
        result.canonicalize();
    } else {
        long exponent = 0;
        if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
            auto exp_text = text.substr(e + 1);
            bool exp_neg = false;
            if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
                exp_neg = exp_text.front() == '-';
                exp_text.remove_prefix(1);
            }
            if (!all_digits(exp_text) || exp_text.size() > 6) return std::nullopt;
            exponent = std::stol(std::string(exp_text));
            if (exp_neg) exponent = -exponent;
            text = text.substr(0, e);
        }
        std::string digits;
        long frac_len = 0;
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            auto int_part = text.substr(0, dot);
            auto frac_part = text.substr(dot + 1);
            if (int_part.empty() && frac_part.empty()) return std::nullopt;
            if ((!int_part.empty() && !all_digits(int_part)) ||
                (!frac_part.empty() && !all_digits(frac_part)))
                return std::nullopt;
            digits = std::string(int_part) + std::string(frac_part);
            frac_len = static_cast<long>(frac_part.size());
        } else {
            if (!all_digits(text)) return std::nullopt;
            digits = std::string(text);
        }
        mpz_class mantissa(digits, 10);
        long scale = exponent - frac_len;
        if (scale >= 0) {
            result = Rational(mantissa * pow10(static_cast<unsigned long>(scale)));
        } else {
            result = Rational(mantissa, pow10(static_cast<unsigned long>(-scale)));
            result.canonicalize();
        }
    }
    if (negative) result = -result;
    return result;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("from_double: non-finite value");
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational round_down_dyadic(const Rational& q, unsigned bits) {
    mpz_class scaled = q.get_num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), bits);
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), q.get_den().get_mpz_t());
    mpz_class den;
    mpz_setbit(den.get_mpz_t(), bits);
    Rational r(scaled, den);
    r.canonicalize();
    return r;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational pow(const Rational& base, unsigned long exp) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), exp);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), exp);
    r.canonicalize();
    return r;
}

long floor_log2(const Rational& q) {
    if (q <= 0) throw std::domain_error("floor_log2: non-positive argument");
    long guess = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
                 static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
    // guess is within one of the answer; settle it exactly.
    auto power = [](long e) {
        Rational p(1);
        if (e >= 0)
            mpq_mul_2exp(p.get_mpq_t(), p.get_mpq_t(), static_cast<unsigned long>(e));
        else
            mpq_div_2exp(p.get_mpq_t(), p.get_mpq_t(), static_cast<unsigned long>(-e));
        return p;
    };
    while (power(guess) > q) --guess;
    while (power(guess + 1) <= q) ++guess;
    return guess;
}

}  // namespace pocan
