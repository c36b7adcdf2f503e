#include "pocan/chain.hpp"

#include "pocan/errors.hpp"

#include <algorithm>

namespace pocan {

std::optional<std::size_t> BsccAnalysis::position(StateId s) const {
    auto it = std::lower_bound(members.begin(), members.end(), s);
    if (it == members.end() || *it != s) return std::nullopt;
    return static_cast<std::size_t>(it - members.begin());
}

const Rational& BsccAnalysis::potential_of(StateId s) const {
    auto pos = position(s);
    if (!pos) throw InternalError("state is not a member of this BSCC");
    return potential[*pos];
}

UnderlyingChain underlying_chain(const Poc& m) {
    const auto n = m.num_states();
    UnderlyingChain u{RatMatrix(n, n), std::vector<Rational>(n), Adjacency(n)};
    for (const auto& r : m.pos_rules()) {
        u.a(r.src, r.dst) += r.prob;
        u.s[r.src] += r.prob * r.delta;
    }
    for (StateId p = 0; p < n; ++p) {
        for (StateId q = 0; q < n; ++q) {
            if (sgn(u.a(p, q)) != 0) u.edges[p].push_back(q);
        }
    }
    return u;
}

SccDecomposition scc_decompose(const UnderlyingChain& u) { return scc_decompose(u.edges); }

BsccAnalysis bscc_analysis(const UnderlyingChain& u, const std::vector<StateId>& members) {
    BsccAnalysis out;
    out.members = members;
    std::sort(out.members.begin(), out.members.end());
    const auto k = out.members.size();
    if (k == 0) throw InternalError("bscc_analysis: empty state set");

    // Restriction A_B; a genuine BSCC keeps all row mass inside.
    RatMatrix ab(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        Rational row;
        for (std::size_t j = 0; j < k; ++j) {
            ab(i, j) = u.a(out.members[i], out.members[j]);
            row += ab(i, j);
        }
        if (row != 1) throw InternalError("bscc_analysis: state set is not closed under the chain");
    }

    // alpha (A_B - I) = 0, sum alpha = 1: transpose and replace the last equation.
    RatMatrix sys(k, k);
    std::vector<Rational> rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) sys(i, j) = ab(j, i) - (i == j ? 1 : 0);
    }
    if (rank_exact(sys) != k - 1) throw InternalError("bscc_analysis: state set is not strongly connected");
    for (std::size_t j = 0; j < k; ++j) sys(k - 1, j) = 1;
    rhs[k - 1] = 1;
    auto alpha = solve_exact(sys, rhs);
    if (!alpha) throw InternalError("bscc_analysis: singular invariant-distribution system");
    out.alpha = std::move(*alpha);
    for (const auto& a : out.alpha) {
        if (sgn(a) <= 0) throw InternalError("bscc_analysis: non-positive invariant distribution entry");
    }

    std::vector<Rational> sb(k);
    for (std::size_t i = 0; i < k; ++i) {
        sb[i] = u.s[out.members[i]];
        out.trend += out.alpha[i] * sb[i];
    }

    // v = (I - A_B + 1 alpha)^{-1} s_B
    RatMatrix z(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) z(i, j) = (i == j ? 1 : 0) - ab(i, j) + out.alpha[j];
    }
    auto v = solve_exact(z, sb);
    if (!v) throw InternalError("bscc_analysis: singular potential system");
    Rational lo = *std::min_element(v->begin(), v->end());
    for (auto& x : *v) x -= lo;
    out.potential = std::move(*v);
    out.v_min = 0;
    out.v_max = *std::max_element(out.potential.begin(), out.potential.end());
    out.span = out.v_max - out.v_min;
    return out;
}

Rational martingale_residual(const Poc& m, const BsccAnalysis& analysis, const Config& c) {
    if (c.counter == 0) throw InternalError("martingale_residual: counter must be positive");
    const Rational before = Rational(static_cast<unsigned long>(c.counter)) + analysis.potential_of(c.state);
    Rational after;
    for (const auto& [next, prob] : step_distribution(m, c)) {
        after += prob * (Rational(static_cast<unsigned long>(next.counter)) + analysis.potential_of(next.state) -
                         analysis.trend);
    }
    return after - before;
}

std::vector<Rational> potential_identity_residual(const UnderlyingChain& u, const BsccAnalysis& analysis) {
    const auto k = analysis.members.size();
    std::vector<Rational> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        auto p = analysis.members[i];
        Rational av;
        for (std::size_t j = 0; j < k; ++j) av += u.a(p, analysis.members[j]) * analysis.potential[j];
        out[i] = u.s[p] + av - analysis.potential[i] - analysis.trend;
    }
    return out;
}

ChainReport analyze_chain(const Poc& m) {
    ChainReport r{underlying_chain(m), {}, {}, std::vector<std::optional<std::size_t>>(m.num_states())};
    r.sccs = scc_decompose(r.chain);
    for (std::size_t c = 0; c < r.sccs.components.size(); ++c) {
        if (!r.sccs.is_bottom[c]) continue;
        for (auto s : r.sccs.components[c]) r.bscc_of[s] = r.bsccs.size();
        r.bsccs.push_back(bscc_analysis(r.chain, r.sccs.components[c]));
    }
    return r;
}

}  // namespace pocan
