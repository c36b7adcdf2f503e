#pragma once

#include "pocan/chain.hpp"
#include "pocan/model.hpp"
#include "pocan/newton.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pocan {

/// A pOC with a Rabin acceptance condition over its control states.
struct RabinPoc {
    Poc poc;
    std::vector<RabinPair> pairs;
};

/// Synchronized product of a pOC with a DRA. Control state (p, r) has index
/// p * |R| + r and is named "p@r".
struct Product {
    RabinPoc rp;
    std::size_t dra_states = 0;

    /// Product state entered by a run that starts in `p`.
    StateId initial(StateId p, const Dra& d) const;
    StateId state(StateId p, std::size_t r) const;
};

/// Throws ValidationError if the valuation uses letters outside the DRA alphabet.
Product product(const Poc& m, const Valuation& val, const Dra& d);

enum class BsccFlag { Consistent, Inconsistent };

/// One flag per BSCC of the underlying chain, in ChainReport order.
std::vector<BsccFlag> consistency_partition(const RabinPoc& rp, const ChainReport& chain);
std::vector<BsccFlag> consistency_partition(const RabinPoc& rp);

/// Replaces all positive rules of states in BSCCs flagged `which` by the
/// single rule q -(1,-1)-> q. Freezing INCONSISTENT gives A_cons, freezing
/// CONSISTENT gives A_inco.
Poc freeze(const RabinPoc& rp, BsccFlag which);

enum class WitnessKind { None, SureDiverger, PositiveTrendBscc };

const char* to_string(WitnessKind k);

struct DivergenceInfo {
    StateId state = 0;
    bool positive = false;
    WitnessKind kind = WitnessKind::None;
    std::optional<StateId> witness;
    std::optional<std::size_t> bscc;   // index into ChainReport::bsccs for the trend case
    std::uint64_t path_length = 0;     // shortest honest path to the witness
    Rational lower_bound;              // certified lower bound on [p diverges]; 0 if not positive
};

DivergenceInfo divergence(const Poc& m, StateId p);
std::vector<DivergenceInfo> divergence_all(const Poc& m);

struct NontermValue {
    double value = 0.0;
    DivergenceInfo info;
    Rational term_rel_err;   // precision of the termination solve, 0 if none was needed
};

/// [p diverges] with relative error <= eps; exactly 0 when not positive.
NontermValue nonterm_prob(const Poc& m, StateId p, const Rational& eps);

/// The finite chain over Q x {0,1} plus acc and rej.
struct ChainG {
    std::size_t num_control = 0;
    std::vector<std::string> names;
    /// Transitions per state, targets ascending. Weights are exact for zero
    /// rules and dyadic approximations otherwise.
    std::vector<std::vector<std::pair<std::uint32_t, Rational>>> trans;
    Adjacency support;
    std::vector<bool> good;        // member of a good BSCC
    std::vector<bool> in_g0;       // good BSCCs unreachable
    std::vector<bool> in_g1;       // good BSCCs reached almost surely
    Rational rel_err;              // transition accuracy

    std::size_t size() const noexcept { return trans.size(); }
    static std::uint32_t at(StateId p, unsigned level) { return 2 * p + level; }
    std::uint32_t acc() const { return static_cast<std::uint32_t>(2 * num_control); }
    std::uint32_t rej() const { return static_cast<std::uint32_t>(2 * num_control + 1); }
};

/// Qualitative structure is exact; numeric weights carry relative error
/// `eps` (term_backend chooses the Newton backend).
ChainG build_chain_g(const RabinPoc& rp, const Rational& eps, Backend term_backend = Backend::Auto);

/// Probability of reaching a good BSCC from every state of g.
std::vector<double> good_bscc_reach(const ChainG& g);
std::vector<Rational> good_bscc_reach_exact(const ChainG& g);

enum class McMode { Adaptive, Rigorous };

struct McResult {
    double probability = 0.0;
    Rational rel_err;
    std::size_t product_states = 0;
    bool qualitative = false;     // decided by the graph alone (0 or 1)
    Rational transition_rel_err;  // accuracy of the final chain's weights
};

/// Probability that a run from start (counter 0 or 1) yields a word the DRA accepts.
McResult model_check(const Poc& m, const Valuation& val, const Dra& d, const Config& start, const Rational& eps,
                     McMode mode = McMode::Adaptive);

}  // namespace pocan
