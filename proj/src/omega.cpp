#include "pocan/omega.hpp"

#include "pocan/bounds.hpp"
#include "pocan/errors.hpp"
#include "pocan/exact_linalg.hpp"
#include "pocan/graph.hpp"
#include "pocan/reach.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

namespace pocan {

// ---------------------------------------------------------------------------
// Product

StateId Product::state(StateId p, std::size_t r) const {
    return static_cast<StateId>(p * dra_states + r);
}

StateId Product::initial(StateId p, const Dra& d) const { return state(p, d.init); }

Product product(const Poc& m, const Valuation& val, const Dra& d) {
    const auto n = m.num_states();
    const auto k = d.states.size();
    if (val.zero_letter.size() != n || val.pos_letter.size() != n) {
        throw ValidationError("valuation does not label every state");
    }
    for (StateId p = 0; p < n; ++p) {
        for (const auto* letter : {&val.zero_letter[p], &val.pos_letter[p]}) {
            if (!d.letter_index(*letter)) {
                throw ValidationError("letter '" + *letter + "' of state " + m.name(p) + " is not in the DRA alphabet");
            }
        }
    }

    std::vector<std::string> names;
    names.reserve(n * k);
    for (StateId p = 0; p < n; ++p) {
        for (std::size_t r = 0; r < k; ++r) names.push_back(m.name(p) + "@" + d.states[r]);
    }
    auto id = [k](StateId p, std::size_t r) { return static_cast<StateId>(p * k + r); };

    std::vector<Rule> zero;
    std::vector<Rule> pos;
    for (StateId p = 0; p < n; ++p) {
        for (std::size_t r = 0; r < k; ++r) {
            auto rz = d.step(r, val.zero_letter[p]);
            for (auto i : m.zero_rules_from(p)) {
                const auto& rule = m.zero_rules()[i];
                zero.push_back({id(p, r), rule.delta, id(rule.dst, rz), rule.prob});
            }
            auto rp = d.step(r, val.pos_letter[p]);
            for (auto i : m.pos_rules_from(p)) {
                const auto& rule = m.pos_rules()[i];
                pos.push_back({id(p, r), rule.delta, id(rule.dst, rp), rule.prob});
            }
        }
    }

    Product out{RabinPoc{Poc(std::move(names), std::move(zero), std::move(pos)), {}}, k};
    for (const auto& pair : d.pairs) {
        RabinPair lifted;
        for (StateId p = 0; p < n; ++p) {
            for (auto r : pair.avoid) lifted.avoid.push_back(id(p, r));
            for (auto r : pair.visit) lifted.visit.push_back(id(p, r));
        }
        std::sort(lifted.avoid.begin(), lifted.avoid.end());
        std::sort(lifted.visit.begin(), lifted.visit.end());
        out.rp.pairs.push_back(std::move(lifted));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Consistency and freezing

namespace {

bool satisfies_some_pair(const std::vector<RabinPair>& pairs, const std::vector<bool>& in_set) {
    for (const auto& pair : pairs) {
        bool hits_avoid = std::any_of(pair.avoid.begin(), pair.avoid.end(), [&](auto s) { return in_set[s]; });
        bool hits_visit = std::any_of(pair.visit.begin(), pair.visit.end(), [&](auto s) { return in_set[s]; });
        if (!hits_avoid && hits_visit) return true;
    }
    return false;
}

}  // namespace

std::vector<BsccFlag> consistency_partition(const RabinPoc& rp, const ChainReport& chain) {
    std::vector<BsccFlag> out;
    for (const auto& b : chain.bsccs) {
        std::vector<bool> in_set(rp.poc.num_states(), false);
        for (auto s : b.members) in_set[s] = true;
        out.push_back(satisfies_some_pair(rp.pairs, in_set) ? BsccFlag::Consistent : BsccFlag::Inconsistent);
    }
    return out;
}

std::vector<BsccFlag> consistency_partition(const RabinPoc& rp) {
    return consistency_partition(rp, analyze_chain(rp.poc));
}

Poc freeze(const RabinPoc& rp, BsccFlag which) {
    const auto& m = rp.poc;
    auto chain = analyze_chain(m);
    auto flags = consistency_partition(rp, chain);
    std::vector<bool> frozen(m.num_states(), false);
    for (std::size_t b = 0; b < chain.bsccs.size(); ++b) {
        if (flags[b] != which) continue;
        for (auto s : chain.bsccs[b].members) frozen[s] = true;
    }
    std::vector<Rule> pos;
    for (const auto& r : m.pos_rules()) {
        if (!frozen[r.src]) pos.push_back(r);
    }
    for (StateId s = 0; s < m.num_states(); ++s) {
        if (frozen[s]) pos.push_back({s, -1, s, Rational(1)});
    }
    std::vector<Rule> zero(m.zero_rules().begin(), m.zero_rules().end());
    return Poc(m.state_names(), std::move(zero), std::move(pos));
}

// ---------------------------------------------------------------------------
// Divergence

const char* to_string(WitnessKind k) {
    switch (k) {
        case WitnessKind::None: return "NONE";
        case WitnessKind::SureDiverger: return "SURE_DIVERGER";
        case WitnessKind::PositiveTrendBscc: return "POSITIVE_TREND_BSCC";
    }
    return "?";
}

namespace {

struct DivergenceContext {
    const Poc& m;
    ChainReport chain;
    std::vector<bool> sure;
    std::vector<std::vector<bool>> reach;
    std::vector<std::optional<StateId>> top_state;  // per BSCC with positive trend: first v_max state

    explicit DivergenceContext(const Poc& model)
        : m(model), chain(analyze_chain(model)), sure(sure_divergers(model)), reach(reach_positive_all(model)) {
        for (const auto& b : chain.bsccs) {
            std::optional<StateId> top;
            if (sgn(b.trend) > 0) {
                for (std::size_t i = 0; i < b.members.size(); ++i) {
                    if (b.potential[i] == b.v_max) {
                        top = b.members[i];
                        break;
                    }
                }
            }
            top_state.push_back(top);
        }
    }

    std::uint64_t witness_length(StateId p, const std::function<bool(StateId)>& accept) const {
        const auto n = static_cast<std::uint64_t>(m.num_states());
        for (std::uint64_t cap = n * (n + 2) + 1; cap <= (1ULL << 20); cap *= 2) {
            if (auto l = shortest_witness(m, p, accept, cap)) return *l;
        }
        throw InternalError("no honest witness path found for a reachable state");
    }

    DivergenceInfo analyze(StateId p) const {
        DivergenceInfo info;
        info.state = p;
        const auto n = m.num_states();
        bool any_sure = false;
        for (StateId q = 0; q < n; ++q) any_sure = any_sure || (reach[p][q] && sure[q]);
        if (any_sure) {
            auto len = witness_length(p, [&](StateId q) { return static_cast<bool>(sure[q]); });
            for (StateId q = 0; q < n; ++q) {
                if (sure[q] && shortest_witness(m, p, [q](StateId s) { return s == q; }, n * (n + 2) + 1 + len) == len) {
                    info.witness = q;
                    break;
                }
            }
            info.positive = true;
            info.kind = WitnessKind::SureDiverger;
            info.path_length = len;
            info.lower_bound = pow(m.x_min(), static_cast<unsigned long>(len));
            return info;
        }
        for (std::size_t b = 0; b < chain.bsccs.size(); ++b) {
            auto q = top_state[b];
            if (!q || !reach[p][*q]) continue;
            auto len = witness_length(p, [q](StateId s) { return s == *q; });
            Rational lb = pow(m.x_min(), static_cast<unsigned long>(len)) *
                          gap_bound(chain.bsccs[b].trend, chain.bsccs[b].span);
            if (!info.positive || lb > info.lower_bound) {
                info.positive = true;
                info.kind = WitnessKind::PositiveTrendBscc;
                info.witness = *q;
                info.bscc = b;
                info.path_length = len;
                info.lower_bound = lb;
            }
        }
        return info;
    }
};

Rational two_pow(long e) {
    Rational r(1);
    if (e >= 0) mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(e));
    else mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-e));
    return r;
}

constexpr long max_precision_bits = 1024;

// Newton options able to deliver relative error `rel`; throws if infeasible.
NewtonOptions options_for(const Rational& rel, Backend backend, const std::string& what) {
    long bits = -floor_log2(rel) + 1;
    if (bits > max_precision_bits) {
        throw PrecisionError(what + " needs termination probabilities to relative error 2^-" + std::to_string(bits) +
                             ", beyond the supported 2^-" + std::to_string(max_precision_bits));
    }
    NewtonOptions opts;
    opts.backend = backend;
    opts.grid_bits = static_cast<unsigned>(std::max<long>(256, bits + 96));
    return opts;
}

// 1 - sum_q [p->q], floored at the certified lower bound; 0 when not positive.
std::vector<Rational> nonterm_from(const Poc& m, const std::vector<DivergenceInfo>& divs, const TermSolution& sol) {
    std::vector<Rational> out(m.num_states());
    for (StateId p = 0; p < m.num_states(); ++p) {
        if (!divs[p].positive) continue;
        Rational v(1);
        for (StateId q = 0; q < m.num_states(); ++q) v -= sol.exact_value(p, q);
        out[p] = std::max(v, divs[p].lower_bound);
    }
    return out;
}

Rational min_positive_lower_bound(const std::vector<DivergenceInfo>& divs) {
    Rational lo(1);
    for (const auto& d : divs) {
        if (d.positive) lo = std::min(lo, d.lower_bound);
    }
    return lo;
}

}  // namespace

DivergenceInfo divergence(const Poc& m, StateId p) {
    if (p >= m.num_states()) throw std::out_of_range("divergence: unknown state");
    return DivergenceContext(m).analyze(p);
}

std::vector<DivergenceInfo> divergence_all(const Poc& m) {
    DivergenceContext ctx(m);
    std::vector<DivergenceInfo> out;
    for (StateId p = 0; p < m.num_states(); ++p) out.push_back(ctx.analyze(p));
    return out;
}

NontermValue nonterm_prob(const Poc& m, StateId p, const Rational& eps) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("nonterm_prob: eps must lie in (0,1)");
    NontermValue out;
    out.info = divergence(m, p);
    if (!out.info.positive) return out;
    Rational rel = eps * out.info.lower_bound / (2 * static_cast<unsigned long>(m.num_states()));
    auto opts = options_for(rel, Backend::Auto, "non-termination probability");
    auto sol = solve_termination(m, rel, opts);
    out.term_rel_err = rel;
    Rational v(1);
    for (StateId q = 0; q < m.num_states(); ++q) v -= sol.exact_value(p, q);
    out.value = std::max(v, out.info.lower_bound).get_d();
    return out;
}

// ---------------------------------------------------------------------------
// The chain G

namespace {

struct Qualitative {
    ChainReport chain;
    std::vector<BsccFlag> flags;
    Poc cons;
    Poc inco;
    std::vector<DivergenceInfo> div_cons;
    std::vector<DivergenceInfo> div_inco;
};

Qualitative qualitative(const RabinPoc& rp) {
    auto chain = analyze_chain(rp.poc);
    auto flags = consistency_partition(rp, chain);
    Poc cons = freeze(rp, BsccFlag::Inconsistent);
    Poc inco = freeze(rp, BsccFlag::Consistent);
    auto dc = divergence_all(cons);
    auto di = divergence_all(inco);
    return {std::move(chain), std::move(flags), std::move(cons), std::move(inco), std::move(dc), std::move(di)};
}

struct Precision {
    Rational term;         // relative error of [p->q]
    Rational nonterm_cons; // relative error of the termination solves behind acc
    Rational nonterm_inco; // ... and behind rej
    Backend backend = Backend::Auto;
};

ChainG assemble(const RabinPoc& rp, const Qualitative& ql, const Precision& prec) {
    const auto& m = rp.poc;
    const auto n = m.num_states();
    ChainG g;
    g.num_control = n;
    g.rel_err = prec.term;
    g.trans.resize(2 * n + 2);
    for (StateId p = 0; p < n; ++p) {
        g.names.push_back(m.name(p) + "(0)");
        g.names.push_back(m.name(p) + "(1)");
    }
    g.names.push_back("acc");
    g.names.push_back("rej");

    auto sol = solve_termination(m, prec.term, options_for(prec.term, prec.backend, "chain construction"));
    std::vector<Rational> acc(n);
    std::vector<Rational> rej(n);
    if (std::any_of(ql.div_cons.begin(), ql.div_cons.end(), [](const auto& d) { return d.positive; })) {
        auto s = solve_termination(ql.cons, prec.nonterm_cons, options_for(prec.nonterm_cons, prec.backend, "acc edges"));
        acc = nonterm_from(ql.cons, ql.div_cons, s);
    }
    if (std::any_of(ql.div_inco.begin(), ql.div_inco.end(), [](const auto& d) { return d.positive; })) {
        auto s = solve_termination(ql.inco, prec.nonterm_inco, options_for(prec.nonterm_inco, prec.backend, "rej edges"));
        rej = nonterm_from(ql.inco, ql.div_inco, s);
    }

    for (StateId p = 0; p < n; ++p) {
        std::map<std::uint32_t, Rational> row0;
        for (auto i : m.zero_rules_from(p)) {
            const auto& r = m.zero_rules()[i];
            row0[ChainG::at(r.dst, static_cast<unsigned>(r.delta))] += r.prob;
        }
        g.trans[ChainG::at(p, 0)].assign(row0.begin(), row0.end());

        auto& row1 = g.trans[ChainG::at(p, 1)];
        for (StateId q = 0; q < n; ++q) {
            if (sol.positive(p, q)) row1.emplace_back(ChainG::at(q, 0), sol.exact_value(p, q));
        }
        if (ql.div_cons[p].positive) row1.emplace_back(g.acc(), acc[p]);
        if (ql.div_inco[p].positive) row1.emplace_back(g.rej(), rej[p]);
    }
    g.trans[g.acc()].emplace_back(g.acc(), Rational(1));
    g.trans[g.rej()].emplace_back(g.rej(), Rational(1));

    g.support.resize(g.trans.size());
    for (std::size_t s = 0; s < g.trans.size(); ++s) {
        for (const auto& [t, w] : g.trans[s]) g.support[s].push_back(t);
    }

    auto sccs = scc_decompose(g.support);
    g.good.assign(g.size(), false);
    for (std::size_t c = 0; c < sccs.components.size(); ++c) {
        if (!sccs.is_bottom[c]) continue;
        const auto& comp = sccs.components[c];
        bool good = false;
        if (comp.size() == 1 && comp[0] == g.acc()) {
            good = true;
        } else if (!(comp.size() == 1 && comp[0] == g.rej())) {
            std::vector<bool> in_set(n, false);
            for (auto s : comp) in_set[s / 2] = true;
            good = satisfies_some_pair(rp.pairs, in_set);
        }
        for (auto s : comp) g.good[s] = good;
    }

    auto rev = transpose(g.support);
    std::vector<std::uint32_t> good_states;
    for (std::uint32_t s = 0; s < g.size(); ++s) {
        if (g.good[s]) good_states.push_back(s);
    }
    auto can_reach_good = reachable_from(rev, good_states);
    g.in_g0.assign(g.size(), false);
    std::vector<std::uint32_t> g0;
    for (std::uint32_t s = 0; s < g.size(); ++s) {
        if (!can_reach_good[s]) {
            g.in_g0[s] = true;
            g0.push_back(s);
        }
    }
    auto can_reach_g0 = reachable_from(rev, g0);
    g.in_g1.assign(g.size(), false);
    for (std::uint32_t s = 0; s < g.size(); ++s) g.in_g1[s] = !can_reach_g0[s];
    return g;
}

}  // namespace

ChainG build_chain_g(const RabinPoc& rp, const Rational& eps, Backend term_backend) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("build_chain_g: eps must lie in (0,1)");
    auto ql = qualitative(rp);
    const auto n2 = 2 * static_cast<unsigned long>(rp.poc.num_states());
    Precision prec;
    prec.term = eps;
    prec.nonterm_cons = eps * min_positive_lower_bound(ql.div_cons) / n2;
    prec.nonterm_inco = eps * min_positive_lower_bound(ql.div_inco) / n2;
    prec.backend = term_backend;
    return assemble(rp, ql, prec);
}

namespace {

std::vector<std::uint32_t> in_between(const ChainG& g) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < g.size(); ++s) {
        if (!g.in_g0[s] && !g.in_g1[s]) out.push_back(s);
    }
    return out;
}

}  // namespace

std::vector<double> good_bscc_reach(const ChainG& g) {
    auto mid = in_between(g);
    std::vector<int> local(g.size(), -1);
    for (std::size_t i = 0; i < mid.size(); ++i) local[mid[i]] = static_cast<int>(i);
    const auto k = static_cast<Eigen::Index>(mid.size());
    std::vector<double> out(g.size(), 0.0);
    for (std::uint32_t s = 0; s < g.size(); ++s) out[s] = g.in_g1[s] ? 1.0 : 0.0;
    if (k == 0) return out;

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (const auto& [t, w] : g.trans[mid[static_cast<std::size_t>(i)]]) {
            if (local[t] >= 0) a(i, local[t]) -= w.get_d();
            else if (g.in_g1[t]) b(i) += w.get_d();
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd x = lu.solve(b);
    x += lu.solve(b - a * x);
    if (!x.allFinite()) throw InternalError("good-BSCC reachability system is singular");
    for (Eigen::Index i = 0; i < k; ++i) out[mid[static_cast<std::size_t>(i)]] = std::clamp(x(i), 0.0, 1.0);
    return out;
}

std::vector<Rational> good_bscc_reach_exact(const ChainG& g) {
    auto mid = in_between(g);
    std::vector<int> local(g.size(), -1);
    for (std::size_t i = 0; i < mid.size(); ++i) local[mid[i]] = static_cast<int>(i);
    std::vector<Rational> out(g.size());
    for (std::uint32_t s = 0; s < g.size(); ++s) out[s] = g.in_g1[s] ? 1 : 0;
    if (mid.empty()) return out;
    RatMatrix a = RatMatrix::identity(mid.size());
    std::vector<Rational> b(mid.size());
    for (std::size_t i = 0; i < mid.size(); ++i) {
        for (const auto& [t, w] : g.trans[mid[i]]) {
            if (local[t] >= 0) a(i, static_cast<std::size_t>(local[t])) -= w;
            else if (g.in_g1[t]) b[i] += w;
        }
    }
    auto x = solve_exact(std::move(a), std::move(b));
    if (!x) throw InternalError("good-BSCC reachability system is singular");
    for (std::size_t i = 0; i < mid.size(); ++i) out[mid[i]] = (*x)[i];
    return out;
}

// ---------------------------------------------------------------------------
// Model checking

namespace {

// Lower bound on the probability of entering a BSCC of g within c steps,
// minimised over the in-between states, using certified edge lower bounds.
Rational visiting_lower_bound(const ChainG& g, const std::vector<std::vector<std::pair<std::uint32_t, Rational>>>& lower,
                              std::size_t c) {
    auto sccs = scc_decompose(g.support);
    std::vector<bool> in_bottom(g.size(), false);
    for (std::size_t i = 0; i < sccs.components.size(); ++i) {
        if (!sccs.is_bottom[i]) continue;
        for (auto s : sccs.components[i]) in_bottom[s] = true;
    }
    std::vector<Rational> r(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) r[s] = in_bottom[s] ? 1 : 0;
    for (std::size_t step = 0; step < c; ++step) {
        auto next = r;
        for (std::size_t s = 0; s < g.size(); ++s) {
            if (in_bottom[s]) continue;
            Rational acc;
            for (const auto& [t, w] : lower[s]) acc += w * r[t];
            next[s] = std::min(Rational(1), acc);
        }
        r = std::move(next);
        // Keep the numbers short; rounding down stays conservative.
        for (auto& x : r) x = round_down_dyadic(x, 128);
    }
    Rational lo(1);
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (!g.in_g0[s] && !g.in_g1[s]) lo = std::min(lo, r[s]);
    }
    return lo;
}

}  // namespace

McResult model_check(const Poc& m, const Valuation& val, const Dra& d, const Config& start, const Rational& eps,
                     McMode mode) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("model_check: eps must lie in (0,1)");
    if (start.counter > 1) throw ValidationError("model_check starts from counter 0 or 1");
    auto prod = product(m, val, d);
    const auto& rp = prod.rp;
    const auto node = ChainG::at(prod.initial(start.state, d), static_cast<unsigned>(start.counter));
    auto ql = qualitative(rp);

    McResult out;
    out.product_states = rp.poc.num_states();
    out.rel_err = eps;

    auto finish_qualitative = [&](const ChainG& g) {
        if (g.in_g0[node] || g.in_g1[node]) {
            out.probability = g.in_g1[node] ? 1.0 : 0.0;
            out.qualitative = true;
            out.transition_rel_err = 0;
            return true;
        }
        return false;
    };

    if (mode == McMode::Rigorous) {
        // Coarse certified pass for the lower bounds on G's edges.
        Precision coarse{two_pow(-48), two_pow(-48), two_pow(-48), Backend::ExactRational};
        auto g0 = assemble(rp, ql, coarse);
        if (finish_qualitative(g0)) return out;
        auto lower = g0.trans;
        for (std::size_t s = 0; s < lower.size(); ++s) {
            for (auto& [t, w] : lower[s]) {
                if (t == g0.acc() && s != g0.acc()) w = ql.div_cons[s / 2].lower_bound;
                else if (t == g0.rej() && s != g0.rej()) w = ql.div_inco[s / 2].lower_bound;
                else if ((s % 2 == 1) && s < g0.acc()) w = round_down_dyadic(w * (1 - two_pow(-40)), 128);
            }
        }
        const auto c = 2 * rp.poc.num_states();
        Rational r = visiting_lower_bound(g0, lower, c);
        Rational delta = visiting_delta(eps, r, c);
        const auto n2 = 2 * static_cast<unsigned long>(rp.poc.num_states());
        Precision prec{delta, delta * min_positive_lower_bound(ql.div_cons) / n2,
                       delta * min_positive_lower_bound(ql.div_inco) / n2, Backend::ExactRational};
        auto g = assemble(rp, ql, prec);
        out.probability = good_bscc_reach_exact(g)[node].get_d();
        out.transition_rel_err = delta;
        return out;
    }

    static const long levels[] = {20, 30, 40, 64, 96, 128};
    std::optional<double> prev;
    for (long bits : levels) {
        Rational rel = two_pow(-bits);
        Precision prec{rel, rel, rel, bits <= 40 ? Backend::Float64 : Backend::ExactRational};
        auto g = assemble(rp, ql, prec);
        if (finish_qualitative(g)) return out;
        double cur = bits <= 40 ? good_bscc_reach(g)[node] : good_bscc_reach_exact(g)[node].get_d();
        if (prev && std::abs(cur - *prev) <= eps.get_d() / 2 * cur) {
            out.probability = cur;
            out.transition_rel_err = rel;
            return out;
        }
        prev = cur;
    }
    throw ConvergenceError("acceptance probability did not stabilize", 0.0);
}

}  // namespace pocan
