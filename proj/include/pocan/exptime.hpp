#pragma once

#include "pocan/bounds.hpp"
#include "pocan/exact_linalg.hpp"
#include "pocan/newton.hpp"

#include <optional>
#include <vector>

namespace pocan {

enum class Verdict { Finite, Infinite };

enum class FinitenessReason { QNotInBscc, BsccTrendNonzero, TrendZeroPrepostFinite, TrendZeroPrepostInfinite };

const char* to_string(Verdict v);
const char* to_string(FinitenessReason r);

struct PairVerdict {
    StateId p = 0;
    StateId q = 0;
    Verdict verdict = Verdict::Finite;
    FinitenessReason reason = FinitenessReason::QNotInBscc;
};

struct FinitenessReport {
    std::vector<PairVerdict> pairs;  // one per pair in T^{>0}, row-major order

    std::vector<StatePair> finite_pairs() const;
    const PairVerdict* find(StateId p, StateId q) const;
};

/// Qualitative decision of E(p->q) < inf for every (p,q) with [p->q] > 0.
FinitenessReport classify_finiteness(const Poc& m, const std::vector<std::vector<bool>>& tpos);

/// V = G V + 1 over the finite pairs, G built from approximate termination
/// probabilities.
struct ExpLinSystem {
    std::vector<StatePair> variables;
    RatMatrix g;
    std::vector<Rational> rhs;

    std::optional<std::size_t> index(StateId p, StateId q) const;
};

/// Throws PrecisionError if a needed termination probability is 0.
ExpLinSystem build_exp_system(const Poc& m, const std::vector<StatePair>& finite_pairs, const TermSolution& terms);

/// Exact solution of (I - G) V = rhs; throws InternalError if singular.
std::vector<Rational> solve_exp_system_exact(const ExpLinSystem& sys);

/// Double-precision LU with one refinement step.
std::vector<double> solve_exp_system(const ExpLinSystem& sys);

enum class ExpMode { Adaptive, Rigorous };

const char* to_string(ExpMode m);

struct ErrorBudget {
    BoundValue b;                  // upper bound on the finite expectations
    std::optional<BoundValue> delta;  // eps / (12 b^2), rigorous mode only
    Rational u{3};                 // bound on the norm of I - H
    BoundValue v_norm;             // bound on the norm of (I - H)^-1, equal to b
    std::optional<Rational> t_min; // smallest nonzero |trend| over BSCCs
};

struct ExpValue {
    StateId p = 0;
    StateId q = 0;
    double value = 0.0;
    double abs_err = 0.0;
};

struct ExpTimeReport {
    FinitenessReport finiteness;
    std::vector<ExpValue> values;  // finite pairs only
    ExpMode mode = ExpMode::Adaptive;
    ErrorBudget budget;
    Rational eps;
    /// Relative error of the termination probabilities behind the final system.
    Rational term_rel_err;

    /// nullopt for infinite or zero-probability pairs.
    std::optional<double> value(StateId p, StateId q) const;
};

/// Upper bound on E(p->q) over all finite pairs, from the case bounds.
BoundValue exp_upper_bound(const Poc& m);

ExpTimeReport expected_times(const Poc& m, const Rational& eps, ExpMode mode = ExpMode::Adaptive);

}  // namespace pocan
