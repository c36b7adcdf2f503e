#pragma once

#include "pocan/model.hpp"
#include "pocan/omega.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pocan {

/// xoshiro256** seeded through splitmix64; one independent stream per
/// (seed, sample index) so results do not depend on the thread count.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

private:
    std::array<std::uint64_t, 4> s_;
};

/// Inverse-CDF rule selection over the model's distributions converted once
/// to doubles; the last rule of each distribution absorbs the rounding slack.
class StepSampler {
public:
    explicit StepSampler(const Poc& m);
    Config step(const Config& c, SampleRng& rng) const;
    /// State whose only zero rule is a probability-1 self-loop without increment.
    bool absorbing_at_zero(StateId s) const { return absorbing_[s]; }

private:
    struct Choice {
        std::uint64_t threshold;  // cumulative probability scaled by 2^53
        std::int64_t delta;
        StateId dst;
    };
    struct Table {
        std::vector<Choice> choices;
        // Choice index for each of the 2^lookup_bits leading-bit buckets that
        // lie inside a single choice, otherwise no_choice.
        std::vector<std::uint8_t> lookup;
    };
    static constexpr int lookup_bits = 10;
    static constexpr std::uint8_t no_choice = 0xff;
    static Table build(std::span<const Rule> rules, const std::vector<std::size_t>& idx);

    std::vector<Table> zero_;
    std::vector<Table> pos_;
    std::vector<bool> absorbing_;
};

struct RunTrace {
    std::vector<Config> configs;
    std::optional<std::pair<std::uint64_t, StateId>> terminated_at;  // first counter-0 visit after the start
    bool truncated = false;  // horizon reached before the first counter-0 visit
};

/// Follows the chain for `horizon` steps (zero rules keep it going at counter 0).
RunTrace sample_run(const Poc& m, const Config& start, std::uint64_t horizon, SampleRng& rng);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n = 0;          // samples the mean is taken over
    std::uint64_t horizon = 0;
    std::uint64_t seed = 0;
    bool heuristic = false;
};

class NoTerminatingSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Worker count: POCAN_THREADS if set and positive, otherwise all cores.
unsigned worker_count();

/// Per-target counts of first counter-0 hits from p(1), with step sums.
struct TerminationCounts {
    std::uint64_t samples = 0;
    std::uint64_t horizon = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> hits;        // per target state
    std::vector<std::uint64_t> step_sum;    // sum of hitting times per target
    std::vector<unsigned __int128> step_sq; // sum of squared hitting times per target
};

TerminationCounts termination_counts(const Poc& m, StateId p, std::uint64_t n, std::uint64_t horizon,
                                     std::uint64_t seed);

Estimate termination_estimate(const TerminationCounts& c, StateId q);
Estimate exp_time_estimate(const TerminationCounts& c, StateId q);

Estimate estimate_termination(const Poc& m, StateId p, StateId q, std::uint64_t n, std::uint64_t horizon,
                              std::uint64_t seed);
Estimate estimate_exp_time(const Poc& m, StateId p, StateId q, std::uint64_t n, std::uint64_t horizon,
                           std::uint64_t seed);

/// Fraction of runs from start whose control states in the last `window`
/// steps satisfy a Rabin pair. Heuristic.
Estimate estimate_acceptance(const RabinPoc& rp, const Config& start, std::uint64_t n, std::uint64_t horizon,
                             std::uint64_t window, std::uint64_t seed);

/// hist[i] = number of runs from start whose first counter-0 visit is at step i.
std::vector<std::uint64_t> first_zero_histogram(const Poc& m, const Config& start, std::uint64_t n,
                                                std::uint64_t horizon, std::uint64_t seed);

/// Runs from p(1) that avoid counter 0 for `horizon` steps and end above `level`.
std::uint64_t count_survivors(const Poc& m, StateId p, std::uint64_t n, std::uint64_t horizon, std::uint64_t level,
                              std::uint64_t seed);

}  // namespace pocan
