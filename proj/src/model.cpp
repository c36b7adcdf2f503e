#include "pocan/model.hpp"

#include "pocan/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace pocan {

// ---------------------------------------------------------------------------
// Poc

Poc::Poc(std::vector<std::string> state_names, std::vector<Rule> zero_rules,
         std::vector<Rule> pos_rules)
    : names_(std::move(state_names)), zero_(std::move(zero_rules)), pos_(std::move(pos_rules)) {
    const auto n = names_.size();
    if (n == 0) throw ValidationError("model declares no states");
    {
        std::set<std::string> seen;
        for (const auto& s : names_) {
            if (!seen.insert(s).second) throw ValidationError("duplicate state '" + s + "'");
        }
    }
    // Rules are kept grouped by source so that equal models compare equal
    // regardless of the order their rules were listed in.
    auto by_src = [](const Rule& a, const Rule& b) { return a.src < b.src; };
    std::stable_sort(zero_.begin(), zero_.end(), by_src);
    std::stable_sort(pos_.begin(), pos_.end(), by_src);
    for (auto* rules : {&zero_, &pos_}) {
        for (auto& r : *rules) r.prob.canonicalize();
    }
    zero_from_.assign(n, {});
    pos_from_.assign(n, {});

    auto check = [&](const std::vector<Rule>& rules, bool zero,
                     std::vector<std::vector<std::size_t>>& from) {
        const char* kind = zero ? "zero" : "positive";
        std::set<std::tuple<StateId, int, StateId>> triples;
        std::vector<Rational> sums(n);
        for (std::size_t i = 0; i < rules.size(); ++i) {
            const auto& r = rules[i];
            if (r.src >= n || r.dst >= n) throw ValidationError(std::string(kind) + " rule refers to an unknown state");
            if (zero ? (r.delta < 0 || r.delta > 1) : (r.delta < -1 || r.delta > 1)) {
                throw ValidationError(std::string(kind) + " rule " + names_[r.src] + " -> " + names_[r.dst] +
                                      " has illegal counter change " + std::to_string(r.delta));
            }
            if (r.prob <= 0 || r.prob > 1) {
                throw ValidationError(std::string(kind) + " rule " + names_[r.src] + " -> " + names_[r.dst] +
                                      " has probability " + to_string(r.prob) + " outside (0,1]");
            }
            if (!triples.emplace(r.src, r.delta, r.dst).second) {
                throw ValidationError("duplicate " + std::string(kind) + " rule " + names_[r.src] + " " +
                                      std::to_string(r.delta) + " " + names_[r.dst]);
            }
            sums[r.src] += r.prob;
            from[r.src].push_back(i);
        }
        for (StateId s = 0; s < n; ++s) {
            if (from[s].empty()) throw ValidationError("state " + names_[s] + " has no " + kind + " rule");
            if (sums[s] != 1) {
                throw ValidationError(std::string(kind) + " rules of state " + names_[s] + " sum to " +
                                      to_string(sums[s]) + ", expected 1");
            }
        }
    };
    check(zero_, true, zero_from_);
    check(pos_, false, pos_from_);

    x_min_ = 1;
    for (const auto& r : zero_) x_min_ = std::min(x_min_, r.prob);
    for (const auto& r : pos_) x_min_ = std::min(x_min_, r.prob);
}

std::optional<StateId> Poc::find(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<StateId>(it - names_.begin());
}

StateId Poc::id(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw ValidationError("unknown state '" + std::string(name) + "'");
}

std::optional<std::size_t> Dra::letter_index(std::string_view letter) const {
    auto it = std::find(alphabet.begin(), alphabet.end(), letter);
    if (it == alphabet.end()) return std::nullopt;
    return static_cast<std::size_t>(it - alphabet.begin());
}

std::size_t Dra::step(std::size_t state, std::string_view letter) const {
    auto l = letter_index(letter);
    if (!l) throw ValidationError("letter '" + std::string(letter) + "' is not in the DRA alphabet");
    return trans.at(state).at(*l);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            if (i > start) line.tokens.push_back({raw.substr(start, i - start), start + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

[[noreturn]] void fail(const Line& line, const Token& tok, const std::string& what) {
    throw ParseError(line.number, tok.column, what);
}

[[noreturn]] void fail_at_end(const Line& line, const std::string& what) {
    const auto& last = line.tokens.back();
    throw ParseError(line.number, last.column + last.text.size(), what);
}

void expect_header(const std::vector<Line>& lines, std::string_view magic) {
    if (lines.empty()) throw ParseError(1, 1, "empty input, expected '" + std::string(magic) + " v1'");
    const auto& first = lines.front();
    if (first.tokens.size() != 2 || first.tokens[0].text != magic || first.tokens[1].text != "v1") {
        fail(first, first.tokens[0], "expected header '" + std::string(magic) + " v1'");
    }
}

class StateTable {
public:
    void declare(const Line& line, const Token& tok) {
        if (!is_identifier(tok.text)) fail(line, tok, "invalid identifier '" + std::string(tok.text) + "'");
        std::string name(tok.text);
        if (index_.count(name)) fail(line, tok, "state '" + name + "' declared twice");
        index_.emplace(name, names_.size());
        names_.push_back(std::move(name));
    }
    std::size_t lookup(const Line& line, const Token& tok) const {
        auto it = index_.find(std::string(tok.text));
        if (it == index_.end()) fail(line, tok, "unknown state '" + std::string(tok.text) + "'");
        return it->second;
    }
    std::vector<std::string>& names() { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

int parse_delta(const Line& line, const Token& tok) {
    if (tok.text == "0" || tok.text == "+0" || tok.text == "-0") return 0;
    if (tok.text == "1" || tok.text == "+1") return 1;
    if (tok.text == "-1") return -1;
    fail(line, tok, "counter change must be one of -1, 0, +1");
}

Rational parse_prob(const Line& line, const Token& tok) {
    auto q = parse_rational(tok.text);
    if (!q) fail(line, tok, "malformed probability '" + std::string(tok.text) + "'");
    if (*q <= 0 || *q > 1) fail(line, tok, "probability " + to_string(*q) + " outside (0,1]");
    return *q;
}

}  // namespace

ModelFile parse_model(std::string_view text) {
    auto lines = tokenize(text);
    expect_header(lines, "poc");

    StateTable states;
    std::vector<Rule> zero;
    std::vector<Rule> pos;
    std::map<std::size_t, std::pair<std::string, std::string>> labels;
    std::map<std::pair<int, std::tuple<std::size_t, int, std::size_t>>, std::size_t> seen_rules;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto& kw = line.tokens[0];
        if (kw.text == "state") {
            if (line.tokens.size() < 2) fail_at_end(line, "'state' needs at least one identifier");
            for (std::size_t i = 1; i < line.tokens.size(); ++i) states.declare(line, line.tokens[i]);
        } else if (kw.text == "zero" || kw.text == "pos") {
            bool is_zero = kw.text == "zero";
            if (line.tokens.size() != 5) {
                if (line.tokens.size() < 5) fail_at_end(line, "expected '<src> <delta> <dst> <prob>'");
                fail(line, line.tokens[5], "unexpected token after rule");
            }
            Rule r;
            r.src = static_cast<StateId>(states.lookup(line, line.tokens[1]));
            r.delta = parse_delta(line, line.tokens[2]);
            if (is_zero && r.delta < 0) fail(line, line.tokens[2], "zero rules cannot decrement the counter");
            r.dst = static_cast<StateId>(states.lookup(line, line.tokens[3]));
            r.prob = parse_prob(line, line.tokens[4]);
            auto key = std::make_pair(is_zero ? 0 : 1, std::make_tuple(std::size_t{r.src}, r.delta, std::size_t{r.dst}));
            if (auto [it, fresh] = seen_rules.emplace(key, line.number); !fresh) {
                fail(line, kw, "duplicate rule (first given on line " + std::to_string(it->second) + ")");
            }
            (is_zero ? zero : pos).push_back(std::move(r));
        } else if (kw.text == "label") {
            if (line.tokens.size() != 4) fail(line, kw, "expected 'label <state> zero=<letter> pos=<letter>'");
            auto s = states.lookup(line, line.tokens[1]);
            std::string zl, pl;
            for (std::size_t i = 2; i < 4; ++i) {
                auto t = line.tokens[i].text;
                auto eq = t.find('=');
                if (eq == std::string_view::npos || eq + 1 == t.size()) fail(line, line.tokens[i], "expected key=letter");
                auto key = t.substr(0, eq);
                auto val = std::string(t.substr(eq + 1));
                if (key == "zero") zl = val;
                else if (key == "pos") pl = val;
                else fail(line, line.tokens[i], "unknown label key '" + std::string(key) + "'");
            }
            if (zl.empty() || pl.empty()) fail(line, kw, "label needs both zero= and pos=");
            if (!labels.emplace(s, std::make_pair(zl, pl)).second) fail(line, kw, "state labelled twice");
        } else {
            fail(line, kw, "unknown directive '" + std::string(kw.text) + "'");
        }
    }

    Poc poc(std::move(states.names()), std::move(zero), std::move(pos));
    std::optional<Valuation> valuation;
    if (!labels.empty()) {
        if (labels.size() != poc.num_states()) {
            for (StateId s = 0; s < poc.num_states(); ++s) {
                if (!labels.count(s)) throw ValidationError("valuation is missing a label for state " + poc.name(s));
            }
        }
        Valuation v;
        for (auto& [s, zp] : labels) {
            v.zero_letter.push_back(zp.first);
            v.pos_letter.push_back(zp.second);
        }
        valuation = std::move(v);
    }
    return ModelFile{std::move(poc), std::move(valuation)};
}

Poc parse_poc(std::string_view text) { return parse_model(text).poc; }

Dra parse_dra(std::string_view text) {
    auto lines = tokenize(text);
    expect_header(lines, "dra");

    Dra d;
    StateTable states;
    std::unordered_map<std::string, std::size_t> letters;
    std::optional<std::string> init_name;
    const Line* init_line = nullptr;
    struct PendingTrans {
        const Line* line;
    };
    std::vector<PendingTrans> pending_trans;
    std::vector<const Line*> pending_pairs;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto& kw = line.tokens[0];
        if (kw.text == "alphabet") {
            if (line.tokens.size() < 2) fail_at_end(line, "'alphabet' needs at least one letter");
            for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                const auto& t = line.tokens[i];
                if (!is_identifier(t.text)) fail(line, t, "invalid letter '" + std::string(t.text) + "'");
                if (!letters.emplace(std::string(t.text), d.alphabet.size()).second) fail(line, t, "letter declared twice");
                d.alphabet.emplace_back(t.text);
            }
        } else if (kw.text == "state") {
            if (line.tokens.size() < 2) fail_at_end(line, "'state' needs at least one identifier");
            for (std::size_t i = 1; i < line.tokens.size(); ++i) states.declare(line, line.tokens[i]);
        } else if (kw.text == "init") {
            if (line.tokens.size() != 2) fail(line, kw, "expected 'init <state>'");
            if (init_line) fail(line, kw, "init given twice");
            init_line = &line;
        } else if (kw.text == "trans") {
            if (line.tokens.size() != 4) fail(line, kw, "expected 'trans <state> <letter> <state>'");
            pending_trans.push_back({&line});
        } else if (kw.text == "pair") {
            pending_pairs.push_back(&line);
        } else {
            fail(line, kw, "unknown directive '" + std::string(kw.text) + "'");
        }
    }

    d.states = states.names();
    if (d.states.empty()) throw ValidationError("DRA declares no states");
    if (d.alphabet.empty()) throw ValidationError("DRA declares no alphabet");
    if (!init_line) throw ValidationError("DRA has no init line");
    d.init = states.lookup(*init_line, init_line->tokens[1]);

    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    d.trans.assign(d.states.size(), std::vector<std::size_t>(d.alphabet.size(), unset));
    for (const auto& pt : pending_trans) {
        const auto& line = *pt.line;
        auto from = states.lookup(line, line.tokens[1]);
        auto lit = letters.find(std::string(line.tokens[2].text));
        if (lit == letters.end()) fail(line, line.tokens[2], "unknown letter '" + std::string(line.tokens[2].text) + "'");
        auto to = states.lookup(line, line.tokens[3]);
        auto& slot = d.trans[from][lit->second];
        if (slot != unset) fail(line, line.tokens[0], "transition given twice (DRA must be deterministic)");
        slot = to;
    }
    for (std::size_t s = 0; s < d.states.size(); ++s) {
        for (std::size_t l = 0; l < d.alphabet.size(); ++l) {
            if (d.trans[s][l] == unset) {
                throw ValidationError("DRA transition function is not total: missing trans(" + d.states[s] + ", " +
                                      d.alphabet[l] + ")");
            }
        }
    }

    for (const Line* lp : pending_pairs) {
        const auto& line = *lp;
        // pair E <ids...> ; F <ids...>
        RabinPair pair;
        std::size_t i = 1;
        if (i >= line.tokens.size() || line.tokens[i].text != "E") fail_at_end(line, "expected 'pair E <ids> ; F <ids>'");
        ++i;
        while (i < line.tokens.size() && line.tokens[i].text != ";") {
            pair.avoid.push_back(states.lookup(line, line.tokens[i]));
            ++i;
        }
        if (i >= line.tokens.size()) fail_at_end(line, "missing ';' between E and F");
        ++i;
        if (i >= line.tokens.size() || line.tokens[i].text != "F") fail_at_end(line, "expected 'F' after ';'");
        ++i;
        for (; i < line.tokens.size(); ++i) pair.visit.push_back(states.lookup(line, line.tokens[i]));
        std::sort(pair.avoid.begin(), pair.avoid.end());
        pair.avoid.erase(std::unique(pair.avoid.begin(), pair.avoid.end()), pair.avoid.end());
        std::sort(pair.visit.begin(), pair.visit.end());
        pair.visit.erase(std::unique(pair.visit.begin(), pair.visit.end()), pair.visit.end());
        d.pairs.push_back(std::move(pair));
    }
    if (d.pairs.empty()) throw ValidationError("DRA has an empty Rabin pair list");
    return d;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string delta_text(int delta) {
    if (delta > 0) return "+1";
    if (delta < 0) return "-1";
    return "0";
}

}  // namespace

std::string render_poc(const Poc& m, const Valuation* valuation) {
    std::ostringstream out;
    out << "poc v1\n";
    out << "state";
    for (const auto& s : m.state_names()) out << ' ' << s;
    out << '\n';
    for (StateId s = 0; s < m.num_states(); ++s) {
        for (auto i : m.zero_rules_from(s)) {
            const auto& r = m.zero_rules()[i];
            out << "zero " << m.name(r.src) << ' ' << delta_text(r.delta) << ' ' << m.name(r.dst) << ' '
                << to_string(r.prob) << '\n';
        }
        for (auto i : m.pos_rules_from(s)) {
            const auto& r = m.pos_rules()[i];
            out << "pos " << m.name(r.src) << ' ' << delta_text(r.delta) << ' ' << m.name(r.dst) << ' '
                << to_string(r.prob) << '\n';
        }
    }
    if (valuation) {
        for (StateId s = 0; s < m.num_states(); ++s) {
            out << "label " << m.name(s) << " zero=" << valuation->zero_letter.at(s)
                << " pos=" << valuation->pos_letter.at(s) << '\n';
        }
    }
    return out.str();
}

std::string render_dra(const Dra& d) {
    std::ostringstream out;
    out << "dra v1\nalphabet";
    for (const auto& a : d.alphabet) out << ' ' << a;
    out << "\nstate";
    for (const auto& s : d.states) out << ' ' << s;
    out << "\ninit " << d.states[d.init] << '\n';
    for (std::size_t s = 0; s < d.states.size(); ++s) {
        for (std::size_t l = 0; l < d.alphabet.size(); ++l) {
            out << "trans " << d.states[s] << ' ' << d.alphabet[l] << ' ' << d.states[d.trans[s][l]] << '\n';
        }
    }
    for (const auto& p : d.pairs) {
        out << "pair E";
        for (auto e : p.avoid) out << ' ' << d.states[e];
        out << " ; F";
        for (auto f : p.visit) out << ' ' << d.states[f];
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Semantics

std::vector<std::pair<Config, Rational>> step_distribution(const Poc& m, const Config& c) {
    std::vector<std::pair<Config, Rational>> out;
    if (c.counter == 0) {
        for (auto i : m.zero_rules_from(c.state)) {
            const auto& r = m.zero_rules()[i];
            out.emplace_back(Config{r.dst, static_cast<std::uint64_t>(r.delta)}, r.prob);
        }
    } else {
        for (auto i : m.pos_rules_from(c.state)) {
            const auto& r = m.pos_rules()[i];
            auto next = static_cast<std::uint64_t>(static_cast<std::int64_t>(c.counter) + r.delta);
            out.emplace_back(Config{r.dst, next}, r.prob);
        }
    }
    return out;
}

Poc and_or_model(const Rational& z, const Rational& y, const Rational& x_a, const Rational& x_o) {
    for (const auto* p : {&z, &y, &x_a, &x_o}) {
        if (*p <= 0 || *p >= 1) throw ValidationError("AND-OR parameters must lie strictly between 0 and 1");
    }
    enum : StateId { and_init, and_ret1, and_ret0, or_init, or_ret1, or_ret0 };
    std::vector<std::string> names{"and_init", "and_ret1", "and_ret0", "or_init", "or_ret1", "or_ret0"};
    const Rational one(1);
    std::vector<Rule> pos{
        // leaf: return 0 or 1; otherwise call OR
        {and_init, -1, or_ret1, y * z},
        {and_init, -1, or_ret0, y * (one - z)},
        {and_init, +1, or_init, one - y},
        // OR returned 1: call another OR, or return 1
        {and_ret1, +1, or_init, one - x_a},
        {and_ret1, -1, or_ret1, x_a},
        // OR returned 0: return 0 immediately
        {and_ret0, -1, or_ret0, one},
        {or_init, -1, and_ret1, y * z},
        {or_init, -1, and_ret0, y * (one - z)},
        {or_init, +1, and_init, one - y},
        {or_ret0, +1, and_init, one - x_o},
        {or_ret0, -1, and_ret0, x_o},
        {or_ret1, -1, and_ret1, one},
    };
    std::vector<Rule> zero;
    for (StateId s = 0; s < names.size(); ++s) zero.push_back({s, 0, s, one});
    return Poc(std::move(names), std::move(zero), std::move(pos));
}

}  // namespace pocan
