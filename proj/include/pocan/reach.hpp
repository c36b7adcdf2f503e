#pragma once

#include "pocan/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace pocan {

/// Finite automaton over the one-letter stack alphabet {X} describing a set of
/// configurations: p(n) is accepted iff some path of exactly n edges leads from
/// state p to an accepting state. States 0..num_control-1 stand for the control
/// states of the model; the rest are auxiliary.
class PAutomaton {
public:
    explicit PAutomaton(std::size_t num_control = 0, std::size_t num_states = 0);

    static PAutomaton empty(std::size_t num_control);
    /// { p(n) : n >= 0 } for every p in `states`.
    static PAutomaton all_counters(std::size_t num_control, const std::vector<StateId>& states);
    /// The finite set `configs`.
    static PAutomaton from_configs(std::size_t num_control, const std::vector<Config>& configs);

    std::size_t num_control() const noexcept { return num_control_; }
    std::size_t num_states() const noexcept { return succ_.size(); }
    std::uint32_t add_state(bool accepting = false);
    /// Returns true if the edge is new.
    bool add_edge(std::uint32_t from, std::uint32_t to);
    bool has_edge(std::uint32_t from, std::uint32_t to) const;
    const std::vector<std::uint32_t>& successors(std::uint32_t s) const { return succ_[s]; }
    std::size_t num_edges() const;

    bool is_accepting(std::uint32_t s) const { return accepting_[s]; }
    void set_accepting(std::uint32_t s, bool value = true) { accepting_[s] = value; }

    bool accepts(const Config& c) const;

    /// Equivalent automaton whose control states have no incoming edges.
    PAutomaton normalized() const;
    /// Restriction to states reachable from a control state and co-reachable
    /// to an accepting state (control states are always kept).
    PAutomaton trimmed() const;

private:
    std::size_t num_control_;
    std::vector<std::vector<std::uint32_t>> succ_;
    std::vector<std::set<std::uint32_t>> succ_set_;
    std::vector<bool> accepting_;
};

/// Configurations from which `target` is reachable along positive rules only.
PAutomaton pre_star(const Poc& m, const PAutomaton& target);

/// Configurations reachable from `source` along positive rules only.
PAutomaton post_star(const Poc& m, const PAutomaton& source);

PAutomaton intersect(const PAutomaton& x, const PAutomaton& y);

bool is_infinite(const PAutomaton& x);

/// All accepted configurations; throws InternalError if the language is infinite.
std::vector<Config> enumerate_finite(const PAutomaton& x);

struct ConfigSetInfo {
    PAutomaton automaton;
    bool finite = false;
    std::optional<std::uint64_t> size_bound;  // |Q|^2 (|Q|+2) when finite
};

ConfigSetInfo describe(const PAutomaton& x);

/// Pre*({q(0)}) intersected with Post*({p(1)}).
PAutomaton honest_corridor(const Poc& m, StateId p, StateId q);

/// T^{>0}: positive[p][q] iff [p->q] > 0.
std::vector<std::vector<bool>> positive_pairs(const Poc& m);

/// States q with [q diverges] = 1, i.e. q(1) cannot reach counter zero.
std::vector<bool> sure_divergers(const Poc& m);

/// [p,q] > 0: some q(k), k >= 1, is reachable from p(1) with the counter staying positive.
bool reach_positive(const Poc& m, StateId p, StateId q);

/// reach[p][q] = reach_positive(m, p, q) for all pairs.
std::vector<std::vector<bool>> reach_positive_all(const Poc& m);

/// Length of a shortest honest path from p(1) to a configuration q(k), k >= 1,
/// with accept(q) true. Counters are capped at `counter_cap`.
std::optional<std::uint64_t> shortest_witness(const Poc& m, StateId p, const std::function<bool(StateId)>& accept,
                                              std::uint64_t counter_cap);

}  // namespace pocan
