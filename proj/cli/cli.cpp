#include "pocan/cli.hpp"

#include "pocan/bounds.hpp"
#include "pocan/chain.hpp"
#include "pocan/errors.hpp"
#include "pocan/exptime.hpp"
#include "pocan/model.hpp"
#include "pocan/newton.hpp"
#include "pocan/omega.hpp"
#include "pocan/reach.hpp"
#include "pocan/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace pocan {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string model_path;
    std::string rel_err;
    std::string abs_err;
    std::string mode = "adaptive";
    bool json = false;
    bool timing = false;
    std::string from;
    std::string to;
    std::string dra_path;
    std::string pairs;
    std::uint64_t samples = 100000;
    std::uint64_t horizon = 10000;
    std::uint64_t seed = 1;
    std::uint64_t window = 100;
    bool time = false;
};

struct Input {
    std::string text;
    ModelFile model;
};

class Timer {
public:
    void phase(const std::string& name) {
        auto now = std::chrono::steady_clock::now();
        if (!current_.empty()) out_[current_] = std::chrono::duration<double>(now - start_).count();
        current_ = name;
        start_ = now;
    }
    json finish() {
        phase("");
        return out_;
    }

private:
    std::string current_;
    std::chrono::steady_clock::time_point start_;
    json out_ = json::object();
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Rational tolerance(const std::string& text, const char* fallback, const char* flag) {
    auto q = parse_rational(text.empty() ? fallback : text);
    if (!q || *q <= 0 || *q >= 1) throw UsageError(std::string(flag) + " must be a number in (0,1)");
    return *q;
}

ExpMode exp_mode(const std::string& s) {
    if (s == "adaptive") return ExpMode::Adaptive;
    if (s == "rigorous") return ExpMode::Rigorous;
    throw UsageError("--mode must be adaptive or rigorous");
}

StateId state_id(const Poc& m, const std::string& name, const char* flag) {
    auto s = m.find(name);
    if (!s) throw ValidationError(std::string(flag) + ": unknown state '" + name + "'");
    return *s;
}

Config parse_from(const Poc& m, const std::string& text) {
    if (text.empty()) return Config{0, 1};
    auto colon = text.rfind(':');
    if (colon != std::string::npos) {
        auto count = text.substr(colon + 1);
        if (!count.empty() && std::all_of(count.begin(), count.end(), [](unsigned char c) { return std::isdigit(c); })) {
            return Config{state_id(m, text.substr(0, colon), "--from"), std::stoull(count)};
        }
    }
    return Config{state_id(m, text, "--from"), 1};
}

// Pair filter from --pairs, --from and --to.
std::function<bool(StateId, StateId)> pair_filter(const Poc& m, const Options& o) {
    std::vector<StatePair> listed;
    if (!o.pairs.empty()) {
        std::stringstream ss(o.pairs);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos) throw UsageError("--pairs expects p:q[,p:q...]");
            listed.emplace_back(state_id(m, item.substr(0, colon), "--pairs"),
                                state_id(m, item.substr(colon + 1), "--pairs"));
        }
    }
    std::optional<StateId> from, to;
    if (!o.from.empty()) from = parse_from(m, o.from).state;
    if (!o.to.empty()) to = state_id(m, o.to, "--to");
    return [=](StateId p, StateId q) {
        if (!listed.empty() && std::find(listed.begin(), listed.end(), StatePair{p, q}) == listed.end()) return false;
        if (from && *from != p) return false;
        if (to && *to != q) return false;
        return true;
    };
}

int decimals(const Rational& tol) { return std::clamp(static_cast<int>(std::ceil(-std::log10(tol.get_d()))), 3, 15); }

std::string fixed(double x, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

std::string sci(double x) {
    std::ostringstream s;
    s << std::setprecision(3) << x;
    return s.str();
}

json log2_or_null(const std::optional<BoundValue>& v) { return v ? json(v->log2()) : json(nullptr); }

std::string pair_name(const Poc& m, StateId p, StateId q) { return "[" + m.name(p) + "↓" + m.name(q) + "]"; }

// Command bodies fill `results` and `precision` and return human-readable text.
struct Outcome {
    json results = json::object();
    json precision = json::object();
    std::string text;
};

Outcome cmd_validate(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    Outcome r;
    r.results["states"] = m.num_states();
    r.results["zero_rules"] = m.zero_rules().size();
    r.results["pos_rules"] = m.pos_rules().size();
    r.results["labels"] = in.model.valuation.has_value();
    std::ostringstream t;
    t << "ok: " << m.num_states() << " states, " << m.zero_rules().size() << " zero rules, " << m.pos_rules().size()
      << " positive rules" << (in.model.valuation ? ", labelled" : "") << "\n";
    if (!o.dra_path.empty()) {
        auto d = parse_dra(read_file(o.dra_path));
        if (in.model.valuation) product(m, *in.model.valuation, d);
        r.results["dra"] = {{"states", d.states.size()}, {"alphabet", d.alphabet.size()}, {"pairs", d.pairs.size()}};
        t << "dra ok: " << d.states.size() << " states, " << d.pairs.size() << " Rabin pairs\n";
    }
    r.text = t.str();
    return r;
}

Outcome cmd_analyze(const Input& in, const Options&) {
    const auto& m = in.model.poc;
    auto chain = analyze_chain(m);
    Outcome r;
    std::ostringstream t;
    json states = json::array();
    for (StateId s = 0; s < m.num_states(); ++s) {
        json st{{"name", m.name(s)}, {"scc", chain.sccs.component_of[s]}};
        st["bscc"] = chain.bscc_of[s] ? json(*chain.bscc_of[s]) : json(nullptr);
        st["s"] = to_string(chain.chain.s[s]);
        states.push_back(st);
    }
    t << "states: " << m.num_states() << ", SCCs: " << chain.sccs.components.size()
      << ", bottom SCCs: " << chain.bsccs.size() << "\n";
    json bsccs = json::array();
    for (std::size_t b = 0; b < chain.bsccs.size(); ++b) {
        const auto& a = chain.bsccs[b];
        json members = json::array(), alpha = json::array(), potential = json::array();
        t << "BSCC " << b << ": trend " << to_string(a.trend) << " (" << sci(a.trend.get_d()) << "), span "
          << to_string(a.span) << "\n";
        for (std::size_t i = 0; i < a.members.size(); ++i) {
            members.push_back(m.name(a.members[i]));
            alpha.push_back(to_string(a.alpha[i]));
            potential.push_back(to_string(a.potential[i]));
            t << "  " << m.name(a.members[i]) << "  alpha " << to_string(a.alpha[i]) << "  v "
              << to_string(a.potential[i]) << "\n";
        }
        bsccs.push_back({{"members", members},
                         {"alpha", alpha},
                         {"trend", to_string(a.trend)},
                         {"trend_value", a.trend.get_d()},
                         {"potential", potential},
                         {"span", to_string(a.span)}});
    }
    r.results["states"] = states;
    r.results["bsccs"] = bsccs;
    r.text = t.str();
    return r;
}

Outcome cmd_term(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    auto eps = tolerance(o.rel_err, "1e-6", "--rel-err");
    auto keep = pair_filter(m, o);
    auto sol = solve_termination(m, eps);
    const int dig = decimals(eps);
    Outcome r;
    std::ostringstream t;
    json pairs = json::array(), totals = json::array();
    for (StateId p = 0; p < m.num_states(); ++p) {
        bool any = false;
        double total = 0;
        for (StateId q = 0; q < m.num_states(); ++q) {
            if (!keep(p, q)) continue;
            any = true;
            double v = sol.value(p, q);
            total += v;
            bool pos = sol.positive(p, q);
            if (!pos && o.pairs.empty()) continue;
            pairs.push_back({{"p", m.name(p)}, {"q", m.name(q)}, {"prob", v}, {"rel_err", pos ? sol.rel_err.get_d() : 0.0}});
            t << pair_name(m, p, q) << " = " << fixed(v, dig) << "\n";
        }
        if (any && o.to.empty() && o.pairs.empty()) {
            totals.push_back({{"p", m.name(p)}, {"prob", total}, {"rel_err", sol.rel_err.get_d()}});
            t << "[" << m.name(p) << "↓] = " << fixed(total, dig) << "\n";
        }
    }
    r.results["pairs"] = pairs;
    r.results["totals"] = totals;
    r.precision = {{"requested", {{"rel_err", eps.get_d()}}},
                   {"achieved", {{"rel_err", sol.rel_err.get_d()}, {"residual", sol.residual}, {"backend", to_string(sol.backend)}}}};
    r.text = t.str();
    return r;
}

Outcome cmd_classify(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    auto keep = pair_filter(m, o);
    auto rep = classify_finiteness(m, positive_pairs(m));
    Outcome r;
    std::ostringstream t;
    json pairs = json::array();
    for (const auto& v : rep.pairs) {
        if (!keep(v.p, v.q)) continue;
        pairs.push_back({{"p", m.name(v.p)}, {"q", m.name(v.q)}, {"verdict", to_string(v.verdict)}, {"reason", to_string(v.reason)}});
        t << "(" << m.name(v.p) << "," << m.name(v.q) << "): " << to_string(v.verdict) << " / " << to_string(v.reason) << "\n";
    }
    r.results["pairs"] = pairs;
    r.text = t.str();
    return r;
}

Outcome cmd_exptime(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    auto eps = tolerance(o.abs_err, "1e-3", "--abs-err");
    auto keep = pair_filter(m, o);
    auto rep = expected_times(m, eps, exp_mode(o.mode));
    const int dig = decimals(eps);
    Outcome r;
    std::ostringstream t;
    json pairs = json::array();
    double worst = 0;
    for (const auto& v : rep.finiteness.pairs) {
        if (!keep(v.p, v.q)) continue;
        json e{{"p", m.name(v.p)}, {"q", m.name(v.q)}};
        std::string shown = "inf";
        if (v.verdict == Verdict::Finite) {
            auto it = std::find_if(rep.values.begin(), rep.values.end(),
                                   [&](const ExpValue& x) { return x.p == v.p && x.q == v.q; });
            e["value"] = it->value;
            e["abs_err"] = it->abs_err;
            worst = std::max(worst, it->abs_err);
            shown = fixed(it->value, dig);
        } else {
            e["value"] = "inf";
            e["abs_err"] = nullptr;
        }
        e["reason"] = to_string(v.reason);
        pairs.push_back(e);
        t << "E" << pair_name(m, v.p, v.q) << " = " << shown << "  (" << to_string(v.reason) << ")\n";
    }
    r.results["pairs"] = pairs;
    r.results["budget"] = {{"b_log2", rep.budget.b.log2()}, {"delta_log2", log2_or_null(rep.budget.delta)}, {"mode", to_string(rep.mode)}};
    r.precision = {{"requested", {{"abs_err", eps.get_d()}}},
                   {"achieved", {{"abs_err", worst}, {"term_rel_err", rep.term_rel_err.get_d()}}}};
    t << "mode " << to_string(rep.mode) << ", b = 2^" << fixed(rep.budget.b.log2(), 2);
    if (rep.budget.delta) t << ", delta = 2^" << fixed(rep.budget.delta->log2(), 2);
    t << "\n";
    r.text = t.str();
    return r;
}

json divergence_json(const Poc& m, const NontermValue& v) {
    const auto& d = v.info;
    json e{{"state", m.name(d.state)}, {"positive", d.positive}};
    e["witness"] = d.witness ? json(m.name(*d.witness)) : json(nullptr);
    e["witness_kind"] = to_string(d.kind);
    e["lower_bound_log2"] = d.positive ? json(BoundValue::of(d.lower_bound, false).log2()) : json(nullptr);
    e["value"] = v.value;
    return e;
}

Outcome cmd_diverge(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    auto eps = tolerance(o.rel_err, "1e-6", "--rel-err");
    const int dig = decimals(eps);
    std::vector<StateId> states;
    if (!o.from.empty()) states.push_back(parse_from(m, o.from).state);
    else for (StateId s = 0; s < m.num_states(); ++s) states.push_back(s);
    Outcome r;
    std::ostringstream t;
    json list = json::array();
    for (auto s : states) {
        auto v = nonterm_prob(m, s, eps);
        list.push_back(divergence_json(m, v));
        t << "[" << m.name(s) << "↑] = " << fixed(v.value, dig);
        if (v.info.positive) {
            t << "  witness " << m.name(*v.info.witness) << " (" << to_string(v.info.kind) << "), lower bound 2^"
              << fixed(BoundValue::of(v.info.lower_bound, false).log2(), 2);
        }
        t << "\n";
    }
    if (!o.from.empty()) r.results = list[0];
    else r.results["states"] = list;
    r.precision = {{"requested", {{"rel_err", eps.get_d()}}}};
    r.text = t.str();
    return r;
}

Dra load_dra(const Options& o) {
    if (o.dra_path.empty()) throw UsageError("--dra is required");
    return parse_dra(read_file(o.dra_path));
}

Outcome cmd_mc(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    if (!in.model.valuation) throw ValidationError("model has no label lines; mc needs a valuation");
    auto d = load_dra(o);
    auto eps = tolerance(o.rel_err, "1e-6", "--rel-err");
    auto start = parse_from(m, o.from);
    if (start.counter > 1) throw UsageError("mc starts from counter 0 or 1");
    auto mode = exp_mode(o.mode) == ExpMode::Adaptive ? McMode::Adaptive : McMode::Rigorous;
    auto res = model_check(m, *in.model.valuation, d, start, eps, mode);
    Outcome r;
    r.results = {{"probability", res.probability}, {"rel_err", res.rel_err.get_d()}, {"product_states", res.product_states},
                 {"qualitative", res.qualitative}};
    r.precision = {{"requested", {{"rel_err", eps.get_d()}}}, {"achieved", {{"rel_err", res.rel_err.get_d()}}}};
    std::ostringstream t;
    t << "P(accept from " << m.name(start.state) << "(" << start.counter << ")) = " << fixed(res.probability, decimals(eps))
      << (res.qualitative ? "  (qualitative)" : "") << "\nproduct states: " << res.product_states << "\n";
    r.text = t.str();
    return r;
}

Outcome cmd_simulate(const Input& in, const Options& o) {
    const auto& m = in.model.poc;
    if (o.samples < 1 || o.horizon < 1) throw UsageError("--samples and --horizon must be positive");
    auto start = parse_from(m, o.from);
    Estimate e;
    std::string quantity;
    if (!o.dra_path.empty()) {
        if (!in.model.valuation) throw ValidationError("model has no label lines; acceptance needs a valuation");
        auto d = load_dra(o);
        auto prod = product(m, *in.model.valuation, d);
        Config s{prod.initial(start.state, d), start.counter};
        e = estimate_acceptance(prod.rp, s, o.samples, o.horizon, o.window, o.seed);
        quantity = "acceptance";
    } else {
        if (start.counter != 1) throw UsageError("termination estimates start at counter 1");
        auto counts = termination_counts(m, start.state, o.samples, o.horizon, o.seed);
        if (!o.to.empty()) {
            auto q = state_id(m, o.to, "--to");
            if (o.time) {
                e = exp_time_estimate(counts, q);
                quantity = "exptime " + m.name(start.state) + " " + m.name(q);
            } else {
                e = termination_estimate(counts, q);
                quantity = "term " + m.name(start.state) + " " + m.name(q);
            }
        } else {
            if (o.time) throw UsageError("--time needs --to");
            std::uint64_t hits = 0;
            for (auto h : counts.hits) hits += h;
            double p = static_cast<double>(hits) / static_cast<double>(o.samples);
            e = Estimate{p, std::sqrt(p * (1 - p) / static_cast<double>(o.samples)), o.samples, o.horizon, o.seed, false};
            quantity = "term " + m.name(start.state);
        }
    }
    Outcome r;
    r.results = {{"quantity", quantity}, {"mean", e.mean}, {"stderr", e.stderr_}, {"n", e.n},
                 {"horizon", e.horizon}, {"seed", e.seed}, {"heuristic", e.heuristic}};
    std::ostringstream t;
    t << quantity << ": " << fixed(e.mean, 6) << " +- " << fixed(e.stderr_, 6) << "  (n " << e.n << ", horizon "
      << e.horizon << ", seed " << e.seed << (e.heuristic ? ", heuristic" : "") << ")\n";
    r.text = t.str();
    return r;
}

json inputs_json(const BoundReport& b) {
    json in = json::object();
    for (const auto& [k, v] : b.inputs) in[k] = to_string(v);
    return in;
}

Outcome cmd_bounds(const Input& in, const Options&) {
    const auto& m = in.model.poc;
    const auto nq = static_cast<unsigned>(m.num_states());
    const Rational x = m.x_min();
    const Rational nqr(nq);
    auto chain = analyze_chain(m);
    std::vector<BoundReport> list;
    list.push_back({"potential_span", {{"nq", nqr}, {"x_min", x}}, potential_span_bound(nq, x)});
    list.push_back({"pumping", {{"nq", nqr}}, BoundValue::of(Rational(pumping_bound(nq)))});
    list.push_back(hitting_bound(nq, x, nq));
    for (auto c : {GrandCase::PrepostFinite, GrandCase::NotInBscc}) {
        list.push_back({std::string("grand_") + to_string(c), {{"nq", nqr}, {"x_min", x}}, grand_bound(c, nq, x)});
    }
    for (std::size_t b = 0; b < chain.bsccs.size(); ++b) {
        const auto& a = chain.bsccs[b];
        const auto tag = "[" + std::to_string(b) + "]";
        if (sgn(a.trend) == 0) continue;
        list.push_back({"grand_" + std::string(to_string(GrandCase::TrendNonzero)) + tag,
                        {{"nq", nqr}, {"x_min", x}, {"t", a.trend}},
                        grand_bound(GrandCase::TrendNonzero, nq, x, a.trend)});
        auto az = azuma_tail(a.trend, a.span, 1, 1);
        list.push_back({"azuma_base" + tag, {{"t", a.trend}, {"span", a.span}, {"h", az.h}}, az.a});
        if (sgn(a.trend) > 0) {
            list.push_back({"gap" + tag, {{"t", a.trend}, {"span", a.span}}, BoundValue::of(gap_bound(a.trend, a.span), false)});
            auto dt = divergence_tail(a.trend, a.span, 0);
            list.push_back({"divergence_base" + tag, {{"t", a.trend}, {"span", a.span}, {"threshold", dt.threshold}}, dt.a});
            list.push_back({"reach_high" + tag, {{"span", a.span}, {"b", Rational(1)}},
                            BoundValue::of(reach_high_bound(a.span, 1), false)});
        }
    }
    list.push_back({"exp_upper", {{"nq", nqr}, {"x_min", x}}, exp_upper_bound(m)});

    Outcome r;
    std::ostringstream t;
    json arr = json::array();
    for (const auto& b : list) {
        json e{{"name", b.name}, {"inputs", inputs_json(b)}, {"value_log2", b.value.log2()}};
        if (b.value.exact) e["value"] = to_string(*b.value.exact);
        if (b.deterministic_zero) e["deterministic_zero"] = true;
        arr.push_back(e);
        t << std::left << std::setw(28) << b.name << " " << b.value.to_string();
        if (b.deterministic_zero) t << "  (deterministic: 0)";
        t << "\n";
    }
    r.results["bounds"] = arr;
    r.text = t.str();
    return r;
}

using Command = Outcome (*)(const Input&, const Options&);

int report_error(std::ostream& err, const char* kind, const std::string& what, int code) {
    err << "pocan: " << kind << ": " << what << "\n";
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analysis of probabilistic one-counter automata", "pocan"};
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "Parse and validate a model (and a DRA with --dra)"},
        {"analyze", "Underlying chain: BSCCs, trends, potentials"},
        {"term", "Termination probabilities"},
        {"classify", "Finiteness of expected termination times"},
        {"exptime", "Expected termination times"},
        {"diverge", "Divergence probabilities"},
        {"mc", "Probability that a run is accepted by a DRA"},
        {"simulate", "Monte-Carlo estimates"},
        {"bounds", "Closed-form bounds for a model"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("model", o.model_path, "Model file")->required();
        sub->add_flag("--json", o.json, "Machine-readable output");
        sub->add_flag("--timing", o.timing, "Include wall-clock timing in the JSON report");
        sub->add_option("--rel-err", o.rel_err, "Relative error");
        sub->add_option("--abs-err", o.abs_err, "Absolute error");
        sub->add_option("--mode", o.mode, "adaptive|rigorous");
        sub->add_option("--from", o.from, "<state>[:<counter>]");
        sub->add_option("--to", o.to, "Target state");
        sub->add_option("--dra", o.dra_path, "DRA file");
        sub->add_option("--pairs", o.pairs, "p:q[,p:q...]");
        sub->add_option("--samples", o.samples, "Number of samples");
        sub->add_option("--horizon", o.horizon, "Steps per sample");
        sub->add_option("--seed", o.seed, "Seed");
        sub->add_option("--window", o.window, "Acceptance window");
        sub->add_flag("--time", o.time, "simulate: expected termination time instead of probability");
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "usage", e.what(), ExitUsage);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    static const std::vector<std::pair<std::string, Command>> table = {
        {"validate", cmd_validate}, {"analyze", cmd_analyze}, {"term", cmd_term},
        {"classify", cmd_classify}, {"exptime", cmd_exptime}, {"diverge", cmd_diverge},
        {"mc", cmd_mc},             {"simulate", cmd_simulate}, {"bounds", cmd_bounds},
    };
    auto cmd = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; })->second;

    try {
        if (o.mode != "adaptive" && o.mode != "rigorous") throw UsageError("--mode must be adaptive or rigorous");
        Timer timer;
        timer.phase("parse");
        std::string text = read_file(o.model_path);
        Input in{text, parse_model(text)};
        timer.phase(name);
        Outcome res = cmd(in, o);
        if (o.json) {
            json rep{{"command", name}, {"model", {{"path", o.model_path}, {"hash", content_hash(in.text)}}}};
            rep["results"] = res.results;
            rep["precision"] = res.precision;
            if (o.timing) rep["timing"] = timer.finish();
            out << rep.dump(2) << "\n";
        } else {
            out << res.text;
        }
        return ExitOk;
    } catch (const UsageError& e) {
        return report_error(err, "usage", e.what(), ExitUsage);
    } catch (const ParseError& e) {
        return report_error(err, "parse error", e.what(), ExitInvalidInput);
    } catch (const ValidationError& e) {
        return report_error(err, "invalid input", e.what(), ExitInvalidInput);
    } catch (const PrecisionError& e) {
        return report_error(err, "precision", e.what(), ExitPrecision);
    } catch (const ConvergenceError& e) {
        return report_error(err, "precision", e.what(), ExitPrecision);
    } catch (const NoTerminatingSamples& e) {
        return report_error(err, "precision", e.what(), ExitPrecision);
    } catch (const std::exception& e) {
        return report_error(err, "internal error", e.what(), ExitInternal);
    }
}

}  // namespace pocan
