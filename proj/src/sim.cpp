#include "pocan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace pocan {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Runs body(begin, end, acc) on contiguous index blocks and merges the
// per-block accumulators in block order.
template <typename Acc, typename Body, typename Merge>
Acc parallel_blocks(std::uint64_t n, Acc init, Body body, Merge merge) {
    const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(worker_count(), n)));
    std::vector<Acc> parts(workers, init);
    auto run = [&](unsigned w) {
        std::uint64_t begin = n * w / workers;
        std::uint64_t end = n * (w + 1) / workers;
        body(begin, end, parts[w]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    Acc out = init;
    for (auto& p : parts) merge(out, p);
    return out;
}

}  // namespace

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t SampleRng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double SampleRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

StepSampler::Table StepSampler::build(std::span<const Rule> rules, const std::vector<std::size_t>& idx) {
    constexpr double scale = 0x1.0p53;
    Table t;
    Rational acc;
    for (auto i : idx) {
        acc += rules[i].prob;
        t.choices.push_back({static_cast<std::uint64_t>(acc.get_d() * scale), rules[i].delta, rules[i].dst});
    }
    t.choices.back().threshold = ~std::uint64_t{0};  // residual bucket
    if (t.choices.size() > no_choice) throw std::invalid_argument("StepSampler: too many rules for one state");
    const std::uint64_t width = std::uint64_t{1} << (53 - lookup_bits);
    t.lookup.assign(std::size_t{1} << lookup_bits, no_choice);
    std::size_t c = 0;
    for (std::size_t k = 0; k < t.lookup.size(); ++k) {
        const std::uint64_t lo = k * width;
        const std::uint64_t hi = lo + width - 1;
        while (lo >= t.choices[c].threshold) ++c;
        if (hi < t.choices[c].threshold) t.lookup[k] = static_cast<std::uint8_t>(c);
    }
    return t;
}

StepSampler::StepSampler(const Poc& m) : zero_(m.num_states()), pos_(m.num_states()), absorbing_(m.num_states()) {
    for (StateId s = 0; s < m.num_states(); ++s) {
        zero_[s] = build(m.zero_rules(), m.zero_rules_from(s));
        pos_[s] = build(m.pos_rules(), m.pos_rules_from(s));
        const auto& z = zero_[s].choices;
        absorbing_[s] = z.size() == 1 && z[0].delta == 0 && z[0].dst == s;
    }
}

Config StepSampler::step(const Config& c, SampleRng& rng) const {
    const auto& table = c.counter == 0 ? zero_[c.state] : pos_[c.state];
    const std::uint64_t u = rng.next() >> 11;
    std::size_t i = table.lookup[u >> (53 - lookup_bits)];
    if (i == no_choice) {
        i = 0;
        while (u >= table.choices[i].threshold) ++i;
    }
    const auto& ch = table.choices[i];
    return Config{ch.dst, static_cast<std::uint64_t>(static_cast<std::int64_t>(c.counter) + ch.delta)};
}

RunTrace sample_run(const Poc& m, const Config& start, std::uint64_t horizon, SampleRng& rng) {
    if (horizon < 1) throw std::invalid_argument("sample_run: horizon must be >= 1");
    StepSampler sampler(m);
    RunTrace trace;
    trace.configs.reserve(std::min<std::uint64_t>(horizon + 1, 1 << 16));
    trace.configs.push_back(start);
    Config c = start;
    for (std::uint64_t i = 1; i <= horizon; ++i) {
        c = sampler.step(c, rng);
        trace.configs.push_back(c);
        if (c.counter == 0 && !trace.terminated_at) trace.terminated_at = std::make_pair(i, c.state);
    }
    trace.truncated = !trace.terminated_at;
    return trace;
}

unsigned worker_count() {
    if (const char* env = std::getenv("POCAN_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TerminationCounts termination_counts(const Poc& m, StateId p, std::uint64_t n, std::uint64_t horizon,
                                     std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("termination_counts: n must be >= 1");
    StepSampler sampler(m);
    const auto k = m.num_states();
    TerminationCounts init;
    init.hits.assign(k, 0);
    init.step_sum.assign(k, 0);
    init.step_sq.assign(k, 0);
    auto out = parallel_blocks(
        n, init,
        [&](std::uint64_t begin, std::uint64_t end, TerminationCounts& acc) {
            for (std::uint64_t s = begin; s < end; ++s) {
                SampleRng rng(seed, s);
                Config c{p, 1};
                for (std::uint64_t i = 1; i <= horizon; ++i) {
                    c = sampler.step(c, rng);
                    if (c.counter == 0) {
                        acc.hits[c.state] += 1;
                        acc.step_sum[c.state] += i;
                        acc.step_sq[c.state] += static_cast<unsigned __int128>(i) * i;
                        break;
                    }
                    if (c.counter > horizon - i) break;  // cannot reach zero in time
                }
            }
        },
        [](TerminationCounts& into, const TerminationCounts& part) {
            for (std::size_t q = 0; q < into.hits.size(); ++q) {
                into.hits[q] += part.hits[q];
                into.step_sum[q] += part.step_sum[q];
                into.step_sq[q] += part.step_sq[q];
            }
        });
    out.samples = n;
    out.horizon = horizon;
    out.seed = seed;
    return out;
}

Estimate termination_estimate(const TerminationCounts& c, StateId q) {
    Estimate e;
    e.n = c.samples;
    e.horizon = c.horizon;
    e.seed = c.seed;
    double p = static_cast<double>(c.hits[q]) / static_cast<double>(c.samples);
    e.mean = p;
    e.stderr_ = std::sqrt(p * (1 - p) / static_cast<double>(c.samples));
    return e;
}

Estimate exp_time_estimate(const TerminationCounts& c, StateId q) {
    if (c.hits[q] == 0) throw NoTerminatingSamples("no sampled run terminated in the requested state");
    Estimate e;
    e.n = c.hits[q];
    e.horizon = c.horizon;
    e.seed = c.seed;
    const auto h = static_cast<long double>(c.hits[q]);
    long double mean = static_cast<long double>(c.step_sum[q]) / h;
    long double var = static_cast<long double>(c.step_sq[q]) / h - mean * mean;
    if (c.hits[q] > 1) var = var * h / (h - 1);
    e.mean = static_cast<double>(mean);
    e.stderr_ = static_cast<double>(std::sqrt(std::max<long double>(var, 0) / h));
    return e;
}

Estimate estimate_termination(const Poc& m, StateId p, StateId q, std::uint64_t n, std::uint64_t horizon,
                              std::uint64_t seed) {
    return termination_estimate(termination_counts(m, p, n, horizon, seed), q);
}

Estimate estimate_exp_time(const Poc& m, StateId p, StateId q, std::uint64_t n, std::uint64_t horizon,
                           std::uint64_t seed) {
    return exp_time_estimate(termination_counts(m, p, n, horizon, seed), q);
}

Estimate estimate_acceptance(const RabinPoc& rp, const Config& start, std::uint64_t n, std::uint64_t horizon,
                             std::uint64_t window, std::uint64_t seed) {
    if (window >= horizon) throw std::invalid_argument("estimate_acceptance: window must be < horizon");
    if (n < 1) throw std::invalid_argument("estimate_acceptance: n must be >= 1");
    const auto& m = rp.poc;
    StepSampler sampler(m);
    const auto k = m.num_states();
    std::uint64_t accepted = parallel_blocks(
        n, std::uint64_t{0},
        [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& acc) {
            std::vector<std::uint64_t> last_seen(k);
            std::vector<bool> in_window(k);
            for (std::uint64_t s = begin; s < end; ++s) {
                SampleRng rng(seed, s);
                std::fill(last_seen.begin(), last_seen.end(), 0);
                std::vector<bool> seen(k, false);
                Config c = start;
                for (std::uint64_t i = 1; i <= horizon; ++i) {
                    c = sampler.step(c, rng);
                    last_seen[c.state] = i;
                    seen[c.state] = true;
                    if (c.counter == 0 && sampler.absorbing_at_zero(c.state)) {
                        last_seen[c.state] = horizon;
                        break;
                    }
                }
                for (StateId q = 0; q < k; ++q) in_window[q] = seen[q] && last_seen[q] > horizon - window;
                bool ok = false;
                for (const auto& pair : rp.pairs) {
                    bool avoid = std::none_of(pair.avoid.begin(), pair.avoid.end(), [&](auto q) { return in_window[q]; });
                    bool visit = std::any_of(pair.visit.begin(), pair.visit.end(), [&](auto q) { return in_window[q]; });
                    ok = ok || (avoid && visit);
                }
                acc += ok ? 1 : 0;
            }
        },
        [](std::uint64_t& into, std::uint64_t part) { into += part; });
    Estimate e;
    e.n = n;
    e.horizon = horizon;
    e.seed = seed;
    e.heuristic = true;
    e.mean = static_cast<double>(accepted) / static_cast<double>(n);
    e.stderr_ = std::sqrt(e.mean * (1 - e.mean) / static_cast<double>(n));
    return e;
}

std::vector<std::uint64_t> first_zero_histogram(const Poc& m, const Config& start, std::uint64_t n,
                                                std::uint64_t horizon, std::uint64_t seed) {
    StepSampler sampler(m);
    return parallel_blocks(
        n, std::vector<std::uint64_t>(horizon + 1, 0),
        [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& hist) {
            for (std::uint64_t s = begin; s < end; ++s) {
                SampleRng rng(seed, s);
                Config c = start;
                if (c.counter == 0) {
                    hist[0] += 1;
                    continue;
                }
                for (std::uint64_t i = 1; i <= horizon; ++i) {
                    c = sampler.step(c, rng);
                    if (c.counter == 0) {
                        hist[i] += 1;
                        break;
                    }
                    if (c.counter > horizon - i) break;
                }
            }
        },
        [](std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& part) {
            for (std::size_t i = 0; i < into.size(); ++i) into[i] += part[i];
        });
}

std::uint64_t count_survivors(const Poc& m, StateId p, std::uint64_t n, std::uint64_t horizon, std::uint64_t level,
                              std::uint64_t seed) {
    StepSampler sampler(m);
    return parallel_blocks(
        n, std::uint64_t{0},
        [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& acc) {
            for (std::uint64_t s = begin; s < end; ++s) {
                SampleRng rng(seed, s);
                Config c{p, 1};
                bool survived = true;
                for (std::uint64_t i = 1; i <= horizon; ++i) {
                    c = sampler.step(c, rng);
                    if (c.counter == 0) {
                        survived = false;
                        break;
                    }
                    if (c.counter > level + (horizon - i)) break;  // stays above level
                }
                if (survived && c.counter > level) acc += 1;
            }
        },
        [](std::uint64_t& into, std::uint64_t part) { into += part; });
}

}  // namespace pocan
