#pragma once

#include "pocan/rational.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pocan {

using StateId = std::uint32_t;

struct Rule {
    StateId src = 0;
    int delta = 0;
    StateId dst = 0;
    Rational prob;

    bool operator==(const Rule&) const = default;
};

/// A configuration p(n).
struct Config {
    StateId state = 0;
    std::uint64_t counter = 0;

    bool operator==(const Config&) const = default;
    auto operator<=>(const Config&) const = default;
};

/// Probabilistic one-counter automaton.
///
/// Zero rules fire at counter 0 and may not decrement; positive rules fire at
/// counter >= 1. Construction validates the model: every state has both kinds
/// of rules, each distribution sums to exactly 1, and probabilities lie in (0,1].
class Poc {
public:
    Poc(std::vector<std::string> state_names, std::vector<Rule> zero_rules,
        std::vector<Rule> pos_rules);

    std::size_t num_states() const noexcept { return names_.size(); }
    const std::vector<std::string>& state_names() const noexcept { return names_; }
    const std::string& name(StateId s) const { return names_.at(s); }
    std::optional<StateId> find(std::string_view name) const;
    /// Like find(), but throws ValidationError for unknown names.
    StateId id(std::string_view name) const;

    std::span<const Rule> zero_rules() const noexcept { return zero_; }
    std::span<const Rule> pos_rules() const noexcept { return pos_; }
    /// Indices into zero_rules() / pos_rules() of the rules leaving `s`.
    const std::vector<std::size_t>& zero_rules_from(StateId s) const { return zero_from_.at(s); }
    const std::vector<std::size_t>& pos_rules_from(StateId s) const { return pos_from_.at(s); }

    /// Smallest rule probability over all rules.
    const Rational& x_min() const noexcept { return x_min_; }

    bool operator==(const Poc& other) const {
        return names_ == other.names_ && zero_ == other.zero_ && pos_ == other.pos_;
    }

private:
    std::vector<std::string> names_;
    std::vector<Rule> zero_;
    std::vector<Rule> pos_;
    std::vector<std::vector<std::size_t>> zero_from_;
    std::vector<std::vector<std::size_t>> pos_from_;
    Rational x_min_;
};

/// Assigns a letter to every configuration; depends only on the state and on
/// whether the counter is zero.
struct Valuation {
    std::vector<std::string> zero_letter;
    std::vector<std::string> pos_letter;

    const std::string& letter(StateId s, std::uint64_t counter) const {
        return counter == 0 ? zero_letter.at(s) : pos_letter.at(s);
    }
    bool operator==(const Valuation&) const = default;
};

struct RabinPair {
    std::vector<std::size_t> avoid;   // E: visited only finitely often
    std::vector<std::size_t> visit;   // F: visited infinitely often
};

/// Deterministic Rabin automaton with a total transition function.
struct Dra {
    std::vector<std::string> alphabet;
    std::vector<std::string> states;
    std::size_t init = 0;
    /// trans[state][letter index] -> state
    std::vector<std::vector<std::size_t>> trans;
    std::vector<RabinPair> pairs;

    std::optional<std::size_t> letter_index(std::string_view letter) const;
    std::size_t step(std::size_t state, std::string_view letter) const;
};

struct ModelFile {
    Poc poc;
    std::optional<Valuation> valuation;
};

/// Parses the `poc v1` text format including optional `label` lines.
ModelFile parse_model(std::string_view text);
Poc parse_poc(std::string_view text);
Dra parse_dra(std::string_view text);

/// Canonical text: states in order, rules grouped per source in stored order.
std::string render_poc(const Poc& m, const Valuation* valuation = nullptr);
std::string render_dra(const Dra& d);

/// Successor configurations of `c` with their probabilities.
std::vector<std::pair<Config, Rational>> step_distribution(const Poc& m, const Config& c);

/// The six-state AND-OR tree evaluation model with zero self-loops on every state.
/// States, in order: and_init, and_ret1, and_ret0, or_init, or_ret1, or_ret0.
Poc and_or_model(const Rational& z, const Rational& y, const Rational& x_a, const Rational& x_o);

}  // namespace pocan
