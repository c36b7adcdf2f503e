#include "pocan/exptime.hpp"

#include "pocan/chain.hpp"
#include "pocan/errors.hpp"
#include "pocan/reach.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace pocan {

const char* to_string(Verdict v) { return v == Verdict::Finite ? "FINITE" : "INFINITE"; }

const char* to_string(FinitenessReason r) {
    switch (r) {
        case FinitenessReason::QNotInBscc: return "Q_NOT_IN_BSCC";
        case FinitenessReason::BsccTrendNonzero: return "BSCC_TREND_NONZERO";
        case FinitenessReason::TrendZeroPrepostFinite: return "TREND_ZERO_PREPOST_FINITE";
        case FinitenessReason::TrendZeroPrepostInfinite: return "TREND_ZERO_PREPOST_INFINITE";
    }
    return "?";
}

const char* to_string(ExpMode m) { return m == ExpMode::Adaptive ? "adaptive" : "rigorous"; }

std::vector<StatePair> FinitenessReport::finite_pairs() const {
    std::vector<StatePair> out;
    for (const auto& v : pairs) {
        if (v.verdict == Verdict::Finite) out.emplace_back(v.p, v.q);
    }
    return out;
}

const PairVerdict* FinitenessReport::find(StateId p, StateId q) const {
    for (const auto& v : pairs) {
        if (v.p == p && v.q == q) return &v;
    }
    return nullptr;
}

FinitenessReport classify_finiteness(const Poc& m, const std::vector<std::vector<bool>>& tpos) {
    const auto chain = analyze_chain(m);
    FinitenessReport out;
    for (StateId p = 0; p < m.num_states(); ++p) {
        for (StateId q = 0; q < m.num_states(); ++q) {
            if (!tpos[p][q]) continue;
            PairVerdict v{p, q, Verdict::Finite, FinitenessReason::QNotInBscc};
            if (auto b = chain.bscc_of[q]) {
                if (sgn(chain.bsccs[*b].trend) != 0) {
                    v.reason = FinitenessReason::BsccTrendNonzero;
                } else if (is_infinite(honest_corridor(m, p, q))) {
                    v.verdict = Verdict::Infinite;
                    v.reason = FinitenessReason::TrendZeroPrepostInfinite;
                } else {
                    v.reason = FinitenessReason::TrendZeroPrepostFinite;
                }
            }
            out.pairs.push_back(v);
        }
    }
    return out;
}

std::optional<std::size_t> ExpLinSystem::index(StateId p, StateId q) const {
    auto it = std::lower_bound(variables.begin(), variables.end(), StatePair{p, q});
    if (it == variables.end() || *it != StatePair{p, q}) return std::nullopt;
    return static_cast<std::size_t>(it - variables.begin());
}

ExpLinSystem build_exp_system(const Poc& m, const std::vector<StatePair>& finite_pairs, const TermSolution& terms) {
    ExpLinSystem sys;
    sys.variables = finite_pairs;
    std::sort(sys.variables.begin(), sys.variables.end());
    const auto k = sys.variables.size();
    sys.g = RatMatrix(k, k);
    sys.rhs.assign(k, Rational(1));

    auto column = [&](StateId a, StateId b) {
        auto j = sys.index(a, b);
        if (!j) {
            throw InternalError("expectation system refers to (" + m.name(a) + "," + m.name(b) +
                                ") which is not a finite pair");
        }
        return *j;
    };

    for (std::size_t i = 0; i < k; ++i) {
        const auto [p, q] = sys.variables[i];
        const Rational z = terms.exact_value(p, q);
        if (sgn(z) <= 0) {
            throw PrecisionError("termination probability of (" + m.name(p) + "," + m.name(q) +
                                 ") approximated by 0; increase the termination precision");
        }
        for (auto ri : m.pos_rules_from(p)) {
            const auto& r = m.pos_rules()[ri];
            if (r.delta == 0) {
                if (!terms.positive(r.dst, q)) continue;
                sys.g(i, column(r.dst, q)) += r.prob * terms.exact_value(r.dst, q) / z;
            } else if (r.delta == 1) {
                for (StateId mid = 0; mid < m.num_states(); ++mid) {
                    if (!terms.positive(r.dst, mid) || !terms.positive(mid, q)) continue;
                    Rational w = r.prob * terms.exact_value(r.dst, mid) * terms.exact_value(mid, q) / z;
                    sys.g(i, column(r.dst, mid)) += w;
                    sys.g(i, column(mid, q)) += w;
                }
            }
        }
    }
    return sys;
}

std::vector<Rational> solve_exp_system_exact(const ExpLinSystem& sys) {
    const auto k = sys.variables.size();
    RatMatrix a(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a(i, j) = (i == j ? 1 : 0) - sys.g(i, j);
    }
    auto v = solve_exact(std::move(a), sys.rhs);
    if (!v) throw InternalError("expectation system is singular");
    return *v;
}

std::vector<double> solve_exp_system(const ExpLinSystem& sys) {
    const auto k = static_cast<Eigen::Index>(sys.variables.size());
    if (k == 0) return {};
    Eigen::MatrixXd a(k, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        b(i) = sys.rhs[static_cast<std::size_t>(i)].get_d();
        for (Eigen::Index j = 0; j < k; ++j) {
            a(i, j) = (i == j ? 1.0 : 0.0) - sys.g(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d();
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd x = lu.solve(b);
    Eigen::VectorXd r = b - a * x;
    x += lu.solve(r);
    if (!x.allFinite()) throw InternalError("expectation system is singular");
    return {x.data(), x.data() + k};
}

std::optional<double> ExpTimeReport::value(StateId p, StateId q) const {
    for (const auto& v : values) {
        if (v.p == p && v.q == q) return v.value;
    }
    return std::nullopt;
}

namespace {

struct BoundSummary {
    Rational b{1};
    std::optional<Rational> t_min;
};

BoundSummary upper_bound(const Poc& m, const FinitenessReport& fin, const ChainReport& chain) {
    BoundSummary out;
    const auto nq = static_cast<unsigned>(m.num_states());
    for (const auto& bscc : chain.bsccs) {
        if (sgn(bscc.trend) == 0) continue;
        Rational t = abs(bscc.trend);
        if (!out.t_min || t < *out.t_min) out.t_min = t;
    }
    for (const auto& v : fin.pairs) {
        if (v.verdict != Verdict::Finite) continue;
        BoundValue bv;
        switch (v.reason) {
            case FinitenessReason::QNotInBscc: bv = grand_bound(GrandCase::NotInBscc, nq, m.x_min()); break;
            case FinitenessReason::BsccTrendNonzero:
                bv = grand_bound(GrandCase::TrendNonzero, nq, m.x_min(), chain.bsccs[*chain.bscc_of[v.q]].trend);
                break;
            default: bv = grand_bound(GrandCase::PrepostFinite, nq, m.x_min()); break;
        }
        if (*bv.exact > out.b) out.b = *bv.exact;
    }
    return out;
}

Rational two_pow(long e) {
    Rational r(1);
    if (e >= 0) mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(e));
    else mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-e));
    return r;
}

// Largest precision the exact Newton backend is asked to deliver.
constexpr long max_rigorous_bits = 1024;

}  // namespace

BoundValue exp_upper_bound(const Poc& m) {
    auto chain = analyze_chain(m);
    auto fin = classify_finiteness(m, positive_pairs(m));
    return BoundValue::of(upper_bound(m, fin, chain).b);
}

ExpTimeReport expected_times(const Poc& m, const Rational& eps, ExpMode mode) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("expected_times: eps must lie in (0,1)");
    const auto tpos = positive_pairs(m);
    const auto chain = analyze_chain(m);
    ExpTimeReport out;
    out.mode = mode;
    out.eps = eps;
    out.finiteness = classify_finiteness(m, tpos);
    const auto finite = out.finiteness.finite_pairs();

    auto bounds = upper_bound(m, out.finiteness, chain);
    out.budget.b = BoundValue::of(bounds.b);
    out.budget.v_norm = out.budget.b;
    out.budget.t_min = bounds.t_min;
    if (finite.empty()) return out;

    auto sys_for = [&](const Rational& rel, const NewtonOptions& opts) {
        auto sys = build_term_system(m, tpos);
        auto terms = solve_termination(m, sys, rel, opts);
        return build_exp_system(m, finite, terms);
    };

    if (mode == ExpMode::Rigorous) {
        Rational delta = eps / (12 * bounds.b * bounds.b);
        out.budget.delta = BoundValue::of(delta, false);
        perturbation_factor(out.budget.u, bounds.b, delta);
        // Entries of H are x y / z style ratios with row sums <= 2, so a
        // relative error eta on the probabilities moves each row by <= 4 eta.
        Rational eta = delta / 4;
        long bits = -floor_log2(eta) + 1;
        if (bits > max_rigorous_bits) {
            throw PrecisionError("RIGOROUS_INFEASIBLE: coefficient accuracy 2^" +
                                 std::to_string(out.budget.delta->log2()) + " needs more than " +
                                 std::to_string(max_rigorous_bits) + " bits");
        }
        eta = std::min(eta, two_pow(-bits));
        NewtonOptions opts{Backend::ExactRational, static_cast<unsigned>(std::max<long>(256, bits + 96))};
        out.term_rel_err = eta;
        auto v = solve_exp_system_exact(sys_for(eta, opts));
        const auto& vars = finite;
        auto sorted = vars;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            out.values.push_back({sorted[i].first, sorted[i].second, v[i].get_d(), eps.get_d()});
        }
        return out;
    }

    // Adaptive: tighten the termination precision until two consecutive
    // solutions of the expectation system agree to eps / 2.
    static const long levels[] = {20, 30, 40, 64, 96, 128, 160, 190};
    std::vector<double> prev;
    const double tol = eps.get_d() / 2;
    std::vector<StatePair> sorted = finite;
    std::sort(sorted.begin(), sorted.end());
    for (long bits : levels) {
        Rational rel = two_pow(-bits);
        NewtonOptions opts;
        opts.backend = bits <= 40 ? Backend::Float64 : Backend::ExactRational;
        std::vector<double> cur;
        auto sys = sys_for(rel, opts);
        if (bits <= 40) {
            cur = solve_exp_system(sys);
        } else {
            for (const auto& x : solve_exp_system_exact(sys)) cur.push_back(x.get_d());
        }
        if (!prev.empty()) {
            double diff = 0;
            for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
            if (diff < tol) {
                out.term_rel_err = rel;
                for (std::size_t i = 0; i < sorted.size(); ++i) {
                    out.values.push_back({sorted[i].first, sorted[i].second, cur[i], std::max(diff, 1e-15)});
                }
                return out;
            }
        }
        prev = std::move(cur);
    }
    throw ConvergenceError("expected termination times did not stabilize", 0.0);
}

}  // namespace pocan
