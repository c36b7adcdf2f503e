#pragma once

#include "pocan/model.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fixtures {

using pocan::Config;
using pocan::Poc;
using pocan::Rational;
using pocan::Rule;
using pocan::StateId;

/// One state p: +1 with probability u, -1 with probability d = 1 - u.
inline Poc walk(const Rational& u) {
    Rational d = 1 - u;
    std::vector<Rule> pos;
    if (d > 0) pos.push_back({0, -1, 0, d});
    if (u > 0) pos.push_back({0, +1, 0, u});
    return Poc({"p"}, {{0, 0, 0, Rational(1)}}, pos);
}

inline Poc symmetric_walk() { return walk(Rational(1, 2)); }

inline Poc down_only() { return Poc({"p"}, {{0, 0, 0, Rational(1)}}, {{0, -1, 0, Rational(1)}}); }

inline Poc up_only() { return Poc({"p"}, {{0, 0, 0, Rational(1)}}, {{0, +1, 0, Rational(1)}}); }

/// Random probability vector of length k over multiples of 1/den, all positive.
inline std::vector<Rational> random_distribution(std::mt19937_64& rng, std::size_t k, long den = 10) {
    std::vector<long> parts(k, 1);
    for (long left = den - static_cast<long>(k); left > 0; --left) {
        parts[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] += 1;
    }
    std::vector<Rational> out;
    for (auto p : parts) out.emplace_back(p, den);
    for (auto& q : out) q.canonicalize();
    return out;
}

struct RandomOptions {
    std::size_t max_states = 4;
    bool strongly_connected = false;
    /// Extra weight on +1 rules.
    int up_bias = 0;
};

/// Random valid pOC. With strongly_connected, a cycle through all states is
/// embedded in the positive rules.
inline Poc random_poc(std::mt19937_64& rng, const RandomOptions& opt) {
    auto n = std::uniform_int_distribution<std::size_t>(1, opt.max_states)(rng);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
    std::vector<Rule> zero;
    std::vector<Rule> pos;
    for (StateId p = 0; p < n; ++p) {
        std::set<std::pair<int, StateId>> picks;
        if (opt.strongly_connected) picks.insert({std::uniform_int_distribution<int>(-1, 1)(rng), (p + 1) % n});
        auto count = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < count + opt.up_bias; ++i) {
            int delta = std::uniform_int_distribution<int>(-1, 1)(rng);
            if (i >= count) delta = 1;
            picks.insert({delta, static_cast<StateId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng))});
        }
        auto probs = random_distribution(rng, picks.size(), 20);
        std::size_t i = 0;
        for (const auto& [delta, dst] : picks) pos.push_back({p, delta, dst, probs[i++]});

        std::set<std::pair<int, StateId>> zpicks;
        auto zc = std::uniform_int_distribution<int>(1, 2)(rng);
        for (int j = 0; j < zc; ++j) {
            zpicks.insert({std::uniform_int_distribution<int>(0, 1)(rng),
                           static_cast<StateId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng))});
        }
        auto zprobs = random_distribution(rng, zpicks.size(), 10);
        i = 0;
        for (const auto& [delta, dst] : zpicks) zero.push_back({p, delta, dst, zprobs[i++]});
    }
    return Poc(names, zero, pos);
}

/// Configurations reachable from `from` along positive rules with the counter
/// positive before the last step. Counters above `cap` and paths longer than
/// `depth` are cut off.
inline std::set<Config> brute_post(const Poc& m, const std::vector<Config>& from, std::uint64_t cap,
                                   std::size_t depth) {
    std::set<Config> seen(from.begin(), from.end());
    std::deque<std::pair<Config, std::size_t>> queue;
    for (const auto& c : from) queue.emplace_back(c, 0);
    while (!queue.empty()) {
        auto [c, d] = queue.front();
        queue.pop_front();
        if (c.counter == 0 || d >= depth) continue;
        for (auto i : m.pos_rules_from(c.state)) {
            const auto& r = m.pos_rules()[i];
            Config next{r.dst, c.counter + static_cast<std::uint64_t>(static_cast<std::int64_t>(r.delta))};
            if (r.delta == -1) next.counter = c.counter - 1;
            if (next.counter > cap) continue;
            if (seen.insert(next).second) queue.emplace_back(next, d + 1);
        }
    }
    return seen;
}

/// Whether `target` is reachable from `c` in the same sense.
inline bool brute_reaches(const Poc& m, const Config& c, const Config& target, std::uint64_t cap, std::size_t depth) {
    return brute_post(m, {c}, cap, depth).count(target) > 0;
}

/// Value iteration on the termination equations, starting from 0.
inline std::vector<std::vector<double>> kleene_termination(const Poc& m, std::size_t rounds) {
    const auto n = m.num_states();
    std::vector<std::vector<double>> x(n, std::vector<double>(n, 0.0));
    for (std::size_t it = 0; it < rounds; ++it) {
        auto next = x;
        for (StateId p = 0; p < n; ++p) {
            for (StateId q = 0; q < n; ++q) {
                double acc = 0;
                for (auto i : m.pos_rules_from(p)) {
                    const auto& r = m.pos_rules()[i];
                    double pr = r.prob.get_d();
                    if (r.delta == -1) acc += r.dst == q ? pr : 0.0;
                    else if (r.delta == 0) acc += pr * x[r.dst][q];
                    else {
                        for (StateId mid = 0; mid < n; ++mid) acc += pr * x[r.dst][mid] * x[mid][q];
                    }
                }
                next[p][q] = acc;
            }
        }
        x = std::move(next);
    }
    return x;
}

}  // namespace fixtures
