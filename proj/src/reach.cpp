#include "pocan/reach.hpp"

#include "pocan/errors.hpp"
#include "pocan/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

namespace pocan {

// ---------------------------------------------------------------------------
// PAutomaton

PAutomaton::PAutomaton(std::size_t num_control, std::size_t num_states)
    : num_control_(num_control),
      succ_(std::max(num_control, num_states)),
      succ_set_(std::max(num_control, num_states)),
      accepting_(std::max(num_control, num_states), false) {}

PAutomaton PAutomaton::empty(std::size_t num_control) { return PAutomaton(num_control); }

PAutomaton PAutomaton::all_counters(std::size_t num_control, const std::vector<StateId>& states) {
    PAutomaton a(num_control);
    auto sink = a.add_state(true);
    a.add_edge(sink, sink);
    for (auto p : states) {
        a.set_accepting(p);
        a.add_edge(p, sink);
    }
    return a;
}

PAutomaton PAutomaton::from_configs(std::size_t num_control, const std::vector<Config>& configs) {
    PAutomaton a(num_control);
    // One chain of fresh states per configuration keeps the construction obvious.
    for (const auto& c : configs) {
        if (c.state >= num_control) throw InternalError("from_configs: unknown control state");
        if (c.counter == 0) {
            a.set_accepting(c.state);
            continue;
        }
        std::uint32_t prev = c.state;
        for (std::uint64_t i = 0; i < c.counter; ++i) {
            auto next = a.add_state(i + 1 == c.counter);
            a.add_edge(prev, next);
            prev = next;
        }
    }
    return a;
}

std::uint32_t PAutomaton::add_state(bool accepting) {
    succ_.emplace_back();
    succ_set_.emplace_back();
    accepting_.push_back(accepting);
    return static_cast<std::uint32_t>(succ_.size() - 1);
}

bool PAutomaton::add_edge(std::uint32_t from, std::uint32_t to) {
    if (!succ_set_[from].insert(to).second) return false;
    succ_[from].push_back(to);
    return true;
}

bool PAutomaton::has_edge(std::uint32_t from, std::uint32_t to) const { return succ_set_[from].count(to) != 0; }

std::size_t PAutomaton::num_edges() const {
    std::size_t n = 0;
    for (const auto& s : succ_) n += s.size();
    return n;
}

bool PAutomaton::accepts(const Config& c) const {
    if (c.state >= num_control_) return false;
    std::vector<bool> current(num_states(), false);
    current[c.state] = true;
    for (std::uint64_t step = 0; step < c.counter; ++step) {
        std::vector<bool> next(num_states(), false);
        bool any = false;
        for (std::uint32_t s = 0; s < num_states(); ++s) {
            if (!current[s]) continue;
            for (auto t : succ_[s]) {
                next[t] = true;
                any = true;
            }
        }
        if (!any) return false;
        current.swap(next);
    }
    for (std::uint32_t s = 0; s < num_states(); ++s) {
        if (current[s] && accepting_[s]) return true;
    }
    return false;
}

PAutomaton PAutomaton::normalized() const {
    // Control state p keeps its own edges; every original state also gets a
    // copy at offset num_states() that receives all incoming edges.
    const auto n = static_cast<std::uint32_t>(num_states());
    const auto nc = static_cast<std::uint32_t>(num_control_);
    PAutomaton out(num_control_);
    std::vector<std::uint32_t> copy(n);
    for (std::uint32_t s = 0; s < n; ++s) copy[s] = s < nc ? out.add_state(accepting_[s]) : 0;
    for (std::uint32_t s = nc; s < n; ++s) copy[s] = out.add_state(accepting_[s]);
    for (std::uint32_t p = 0; p < nc; ++p) out.set_accepting(p, accepting_[p]);
    for (std::uint32_t s = 0; s < n; ++s) {
        for (auto t : succ_[s]) {
            out.add_edge(copy[s], copy[t]);
            if (s < nc) out.add_edge(s, copy[t]);
        }
    }
    return out;
}

PAutomaton PAutomaton::trimmed() const {
    const auto n = static_cast<std::uint32_t>(num_states());
    std::vector<std::uint32_t> controls(num_control_);
    for (std::uint32_t p = 0; p < num_control_; ++p) controls[p] = p;
    auto fwd = reachable_from(succ_, controls);
    std::vector<std::uint32_t> finals;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (accepting_[s]) finals.push_back(s);
    }
    auto bwd = reachable_from(transpose(succ_), finals);

    PAutomaton out(num_control_);
    std::vector<std::int64_t> remap(n, -1);
    for (std::uint32_t p = 0; p < num_control_; ++p) remap[p] = p;
    for (std::uint32_t s = static_cast<std::uint32_t>(num_control_); s < n; ++s) {
        if (fwd[s] && bwd[s]) remap[s] = out.add_state(false);
    }
    for (std::uint32_t s = 0; s < n; ++s) {
        if (remap[s] < 0) continue;
        out.set_accepting(static_cast<std::uint32_t>(remap[s]), accepting_[s] && fwd[s] && bwd[s]);
        if (!(fwd[s] && bwd[s])) continue;
        for (auto t : succ_[s]) {
            if (remap[t] >= 0 && fwd[t] && bwd[t]) {
                out.add_edge(static_cast<std::uint32_t>(remap[s]), static_cast<std::uint32_t>(remap[t]));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Saturation
//
// Counter n is the stack X^n. A positive rule (p, d, q) is the pushdown rule
// <p, X> -> <q, X^{1+d}>: a pop (d = -1), a swap (d = 0) or a push (d = +1).

PAutomaton pre_star(const Poc& m, const PAutomaton& target) {
    if (target.num_control() != m.num_states()) throw InternalError("pre_star: automaton/model size mismatch");
    PAutomaton a = target.normalized();

    // swap_into[x] holds every p for which <p,X> -> <x,X> acts as a swap rule,
    // including the derived ones produced by pushes.
    std::vector<std::set<std::uint32_t>> swap_into(a.num_states());
    std::vector<std::vector<StateId>> push_into(m.num_states());
    for (const auto& r : m.pos_rules()) {
        if (r.delta == 0) swap_into[r.dst].insert(r.src);
        if (r.delta == 1) push_into[r.dst].push_back(r.src);
    }

    std::deque<std::pair<std::uint32_t, std::uint32_t>> work;
    for (std::uint32_t s = 0; s < a.num_states(); ++s) {
        for (auto t : a.successors(s)) work.emplace_back(s, t);
    }
    auto add = [&](std::uint32_t from, std::uint32_t to) {
        if (a.add_edge(from, to)) work.emplace_back(from, to);
    };
    for (const auto& r : m.pos_rules()) {
        if (r.delta == -1) add(r.src, r.dst);
    }

    while (!work.empty()) {
        auto [q, q2] = work.front();
        work.pop_front();
        for (auto p : std::vector<std::uint32_t>(swap_into[q].begin(), swap_into[q].end())) add(p, q2);
        if (q < m.num_states()) {
            for (auto p : push_into[q]) {
                if (swap_into[q2].insert(p).second) {
                    auto succ = a.successors(q2);
                    for (auto q3 : succ) add(p, q3);
                }
            }
        }
    }
    return a;
}

PAutomaton post_star(const Poc& m, const PAutomaton& source) {
    if (source.num_control() != m.num_states()) throw InternalError("post_star: automaton/model size mismatch");
    const auto nc = static_cast<std::uint32_t>(m.num_states());
    PAutomaton a = source.normalized();

    // Rel holds processed X-edges (inside `a`) and epsilon edges.
    PAutomaton done(nc, a.num_states());
    std::vector<std::set<std::uint32_t>> eps_into(a.num_states());  // eps_into[q] = {p : p -eps-> q}
    std::vector<std::set<std::uint32_t>> eps_from(nc);

    std::vector<std::uint32_t> push_state(m.pos_rules().size(), 0);
    for (std::size_t i = 0; i < m.pos_rules().size(); ++i) {
        if (m.pos_rules()[i].delta == 1) {
            push_state[i] = a.add_state(false);
            done.add_state(false);
            eps_into.emplace_back();
        }
    }

    struct Item {
        std::uint32_t from, to;
        bool eps;
    };
    std::deque<Item> work;
    for (std::uint32_t s = 0; s < a.num_states(); ++s) {
        for (auto t : a.successors(s)) {
            if (s < nc) work.push_back({s, t, false});
            else done.add_edge(s, t);
        }
    }

    while (!work.empty()) {
        auto item = work.front();
        work.pop_front();
        if (item.eps) {
            if (!eps_from[item.from].insert(item.to).second) continue;
            eps_into[item.to].insert(item.from);
            for (auto q2 : done.successors(item.to)) work.push_back({item.from, q2, false});
            continue;
        }
        if (!done.add_edge(item.from, item.to)) continue;
        const auto p = item.from;
        const auto q = item.to;
        for (auto i : m.pos_rules_from(p)) {
            const auto& r = m.pos_rules()[i];
            if (r.delta == -1) {
                work.push_back({r.dst, q, true});
            } else if (r.delta == 0) {
                work.push_back({r.dst, q, false});
            } else {
                auto mid = push_state[i];
                work.push_back({r.dst, mid, false});
                if (done.add_edge(mid, q)) {
                    for (auto p2 : eps_into[mid]) work.push_back({p2, q, false});
                }
            }
        }
    }

    PAutomaton out(nc, a.num_states());
    for (std::uint32_t s = 0; s < a.num_states(); ++s) {
        out.set_accepting(s, a.is_accepting(s));
        for (auto t : done.successors(s)) out.add_edge(s, t);
    }
    for (std::uint32_t p = 0; p < nc; ++p) {
        for (auto q : eps_from[p]) {
            if (a.is_accepting(q)) out.set_accepting(p);
        }
    }
    return out;
}

PAutomaton intersect(const PAutomaton& x, const PAutomaton& y) {
    if (x.num_control() != y.num_control()) throw InternalError("intersect: control-state count mismatch");
    const auto nc = static_cast<std::uint32_t>(x.num_control());
    PAutomaton out(nc);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
    std::deque<std::pair<std::uint32_t, std::uint32_t>> work;
    auto id_of = [&](std::uint32_t u, std::uint32_t v) {
        auto key = std::make_pair(u, v);
        if (auto it = ids.find(key); it != ids.end()) return it->second;
        std::uint32_t id = (u == v && u < nc) ? u : out.add_state(false);
        out.set_accepting(id, x.is_accepting(u) && y.is_accepting(v));
        ids.emplace(key, id);
        work.push_back(key);
        return id;
    };
    for (std::uint32_t p = 0; p < nc; ++p) id_of(p, p);
    while (!work.empty()) {
        auto [u, v] = work.front();
        work.pop_front();
        auto from = ids.at({u, v});
        for (auto u2 : x.successors(u)) {
            for (auto v2 : y.successors(v)) out.add_edge(from, id_of(u2, v2));
        }
    }
    return out;
}

bool is_infinite(const PAutomaton& x) {
    auto t = x.trimmed();
    // Only states that lie on some accepting path count.
    std::vector<std::uint32_t> controls(t.num_control());
    for (std::uint32_t p = 0; p < t.num_control(); ++p) controls[p] = p;
    Adjacency adj(t.num_states());
    for (std::uint32_t s = 0; s < t.num_states(); ++s) adj[s] = t.successors(s);
    auto fwd = reachable_from(adj, controls);
    std::vector<std::uint32_t> finals;
    for (std::uint32_t s = 0; s < t.num_states(); ++s) {
        if (t.is_accepting(s)) finals.push_back(s);
    }
    auto bwd = reachable_from(transpose(adj), finals);
    Adjacency useful(t.num_states());
    for (std::uint32_t s = 0; s < t.num_states(); ++s) {
        if (!(fwd[s] && bwd[s])) continue;
        for (auto w : adj[s]) {
            if (fwd[w] && bwd[w]) useful[s].push_back(w);
        }
    }
    auto sccs = scc_decompose(useful);
    for (const auto& comp : sccs.components) {
        if (comp.size() > 1) return true;
        auto v = comp.front();
        if (std::find(useful[v].begin(), useful[v].end(), v) != useful[v].end()) return true;
    }
    return false;
}

std::vector<Config> enumerate_finite(const PAutomaton& x) {
    if (is_infinite(x)) throw InternalError("enumerate_finite: language is infinite");
    auto t = x.trimmed();
    // Accepted counters are shorter than the number of trimmed states.
    std::vector<Config> out;
    for (StateId p = 0; p < t.num_control(); ++p) {
        std::vector<bool> current(t.num_states(), false);
        current[p] = true;
        for (std::uint64_t n = 0; n <= t.num_states(); ++n) {
            bool any = false;
            bool acc = false;
            for (std::uint32_t s = 0; s < t.num_states(); ++s) {
                if (!current[s]) continue;
                any = true;
                acc = acc || t.is_accepting(s);
            }
            if (!any) break;
            if (acc) out.push_back({p, n});
            std::vector<bool> next(t.num_states(), false);
            for (std::uint32_t s = 0; s < t.num_states(); ++s) {
                if (!current[s]) continue;
                for (auto w : t.successors(s)) next[w] = true;
            }
            current.swap(next);
        }
    }
    return out;
}

ConfigSetInfo describe(const PAutomaton& x) {
    ConfigSetInfo info{x, !is_infinite(x), std::nullopt};
    if (info.finite) {
        std::uint64_t n = x.num_control();
        info.size_bound = n * n * (n + 2);
    }
    return info;
}

PAutomaton honest_corridor(const Poc& m, StateId p, StateId q) {
    const auto n = m.num_states();
    auto pre = pre_star(m, PAutomaton::from_configs(n, {Config{q, 0}}));
    auto post = post_star(m, PAutomaton::from_configs(n, {Config{p, 1}}));
    return intersect(pre, post);
}

std::vector<std::vector<bool>> positive_pairs(const Poc& m) {
    const auto n = m.num_states();
    std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
    for (StateId q = 0; q < n; ++q) {
        auto pre = pre_star(m, PAutomaton::from_configs(n, {Config{q, 0}}));
        for (StateId p = 0; p < n; ++p) out[p][q] = pre.accepts({p, 1});
    }
    return out;
}

std::vector<bool> sure_divergers(const Poc& m) {
    const auto n = m.num_states();
    std::vector<Config> zeros;
    for (StateId q = 0; q < n; ++q) zeros.push_back({q, 0});
    auto pre = pre_star(m, PAutomaton::from_configs(n, zeros));
    std::vector<bool> out(n);
    for (StateId q = 0; q < n; ++q) out[q] = !pre.accepts({q, 1});
    return out;
}

namespace {

bool has_positive_path(const PAutomaton& a, StateId q) {
    // Some accepting state at distance >= 1 from q.
    std::vector<std::uint32_t> start(a.successors(q).begin(), a.successors(q).end());
    auto seen = reachable_from(
        [&] {
            Adjacency adj(a.num_states());
            for (std::uint32_t s = 0; s < a.num_states(); ++s) adj[s] = a.successors(s);
            return adj;
        }(),
        start);
    for (std::uint32_t s = 0; s < a.num_states(); ++s) {
        if (seen[s] && a.is_accepting(s)) return true;
    }
    return false;
}

}  // namespace

bool reach_positive(const Poc& m, StateId p, StateId q) {
    auto post = post_star(m, PAutomaton::from_configs(m.num_states(), {Config{p, 1}}));
    return has_positive_path(post, q);
}

std::vector<std::vector<bool>> reach_positive_all(const Poc& m) {
    const auto n = m.num_states();
    std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
    for (StateId p = 0; p < n; ++p) {
        auto post = post_star(m, PAutomaton::from_configs(n, {Config{p, 1}}));
        for (StateId q = 0; q < n; ++q) out[p][q] = has_positive_path(post, q);
    }
    return out;
}

std::optional<std::uint64_t> shortest_witness(const Poc& m, StateId p, const std::function<bool(StateId)>& accept,
                                              std::uint64_t counter_cap) {
    struct Hash {
        std::size_t operator()(const Config& c) const noexcept {
            return std::hash<std::uint64_t>{}(c.counter * 1000003u + c.state);
        }
    };
    std::unordered_set<Config, Hash> seen;
    std::deque<std::pair<Config, std::uint64_t>> work;
    work.push_back({Config{p, 1}, 0});
    seen.insert(Config{p, 1});
    while (!work.empty()) {
        auto [c, dist] = work.front();
        work.pop_front();
        if (accept(c.state)) return dist;
        for (auto i : m.pos_rules_from(c.state)) {
            const auto& r = m.pos_rules()[i];
            auto next_counter = static_cast<std::uint64_t>(static_cast<std::int64_t>(c.counter) + r.delta);
            if (next_counter == 0 || next_counter > counter_cap) continue;
            Config next{r.dst, next_counter};
            if (seen.insert(next).second) work.push_back({next, dist + 1});
        }
    }
    return std::nullopt;
}

}  // namespace pocan
