#pragma once

#include "pocan/model.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pocan {

using StatePair = std::pair<StateId, StateId>;

/// Fixed-point equations x = F(x) for the termination probabilities [p->q],
/// one variable per pair in T^{>0}. Every right-hand side is a polynomial of
/// degree <= 2 with non-negative rational coefficients.
struct QuadraticSystem {
    struct Linear {
        std::uint32_t var;
        Rational coef;
        double coef_d;
    };
    struct Bilinear {
        std::uint32_t lhs;
        std::uint32_t rhs;
        Rational coef;
        double coef_d;
    };
    struct Equation {
        Rational constant;
        double constant_d = 0.0;
        std::vector<Linear> linear;
        std::vector<Bilinear> bilinear;
    };

    std::size_t num_states = 0;
    std::vector<StatePair> variables;
    std::vector<Equation> equations;
    /// Variable blocks of the dependency graph, dependencies first.
    std::vector<std::vector<std::uint32_t>> dependency_sccs;

    std::optional<std::uint32_t> var(StateId p, StateId q) const;

    double rhs(std::size_t eq, const std::vector<double>& x) const;
    Rational rhs(std::size_t eq, const std::vector<Rational>& x) const;

private:
    friend QuadraticSystem build_term_system(const Poc&, const std::vector<std::vector<bool>>&);
    std::vector<std::int32_t> index_;  // p * n + q -> variable or -1
};

QuadraticSystem build_term_system(const Poc& m, const std::vector<std::vector<bool>>& tpos);

enum class Backend { Auto, Float64, ExactRational };

const char* to_string(Backend b);

struct NewtonOptions {
    Backend backend = Backend::Auto;
    /// Iterates of the exact backend live on the grid 2^-grid_bits.
    unsigned grid_bits = 256;
};

/// Approximate termination probabilities with a relative-error target.
struct TermSolution {
    std::size_t num_states = 0;
    std::vector<StatePair> pairs;   // T^{>0}, same order as the system variables
    std::vector<double> values;
    std::vector<Rational> exact;    // the iterate itself; dyadic for both backends
    Rational rel_err;
    double residual = 0.0;          // max |F(x) - x|, evaluated exactly
    Backend backend = Backend::Float64;
    std::size_t iterations = 0;

    /// 0 for pairs outside T^{>0}.
    double value(StateId p, StateId q) const;
    Rational exact_value(StateId p, StateId q) const;
    bool positive(StateId p, StateId q) const;

private:
    friend TermSolution solve_termination(const Poc&, const QuadraticSystem&, const Rational&, const NewtonOptions&);
    std::vector<std::int32_t> index_;
};

/// Below this relative error the Auto backend switches to exact rationals.
Rational exact_backend_threshold();

TermSolution solve_termination(const Poc& m, const QuadraticSystem& sys, const Rational& eps,
                               const NewtonOptions& options = {});
TermSolution solve_termination(const Poc& m, const Rational& eps, const NewtonOptions& options = {});

/// max over equations of |rhs(vals) - vals|.
Rational residual(const QuadraticSystem& sys, const std::vector<Rational>& vals);
double residual(const QuadraticSystem& sys, const std::vector<double>& vals);

}  // namespace pocan
