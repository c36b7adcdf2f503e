#pragma once

#include "pocan/exact_linalg.hpp"
#include "pocan/graph.hpp"
#include "pocan/model.hpp"

#include <optional>
#include <vector>

namespace pocan {

/// The finite chain over control states induced by the positive rules, with
/// the expected counter change of each state.
struct UnderlyingChain {
    RatMatrix a;                    // a(p,q) = total positive-rule probability p -> q
    std::vector<Rational> s;        // s[p] = sum of prob * delta over positive rules of p
    Adjacency edges;                // support graph of a

    std::size_t size() const noexcept { return s.size(); }
};

/// Invariant distribution, trend and potential of one bottom SCC.
///
/// The potential satisfies s + A_B v = v + t 1 exactly and is shifted so that
/// its minimum is 0; hence v_min = 0 and span = v_max.
struct BsccAnalysis {
    std::vector<StateId> members;
    std::vector<Rational> alpha;      // indexed like members
    Rational trend;
    std::vector<Rational> potential;  // indexed like members
    Rational v_max;
    Rational v_min;
    Rational span;

    /// Position of `s` in members, or nullopt.
    std::optional<std::size_t> position(StateId s) const;
    const Rational& potential_of(StateId s) const;
};

UnderlyingChain underlying_chain(const Poc& m);

SccDecomposition scc_decompose(const UnderlyingChain& u);

/// Requires `members` to be a bottom SCC of u; throws InternalError otherwise.
BsccAnalysis bscc_analysis(const UnderlyingChain& u, const std::vector<StateId>& members);

/// E[m1 | one step from c] - m0 for m_i = counter_i + v(state_i) - i * t.
Rational martingale_residual(const Poc& m, const BsccAnalysis& analysis, const Config& c);

/// Componentwise s + A_B v - v - t 1 over the BSCC members.
std::vector<Rational> potential_identity_residual(const UnderlyingChain& u, const BsccAnalysis& analysis);

/// Everything the other modules need about the chain of one model.
struct ChainReport {
    UnderlyingChain chain;
    SccDecomposition sccs;
    std::vector<BsccAnalysis> bsccs;
    std::vector<std::optional<std::size_t>> bscc_of;  // state -> index into bsccs
};

ChainReport analyze_chain(const Poc& m);

}  // namespace pocan
