#include "pocan/bounds.hpp"
#include "pocan/reach.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace pocan;

namespace {

Poc and_or_row1() { return and_or_model(Rational(1, 2), Rational(2, 5), Rational(1, 5), Rational(1, 5)); }

Poc up_loop() { return fixtures::up_only(); }

PAutomaton single(const Poc& m, Config c) { return PAutomaton::from_configs(m.num_states(), {c}); }

}  // namespace

TEST_CASE("P-automaton basics") {
    auto e = PAutomaton::empty(2);
    CHECK_FALSE(e.accepts({0, 0}));
    CHECK_FALSE(is_infinite(e));

    auto all = PAutomaton::all_counters(2, {1});
    CHECK(all.accepts({1, 0}));
    CHECK(all.accepts({1, 17}));
    CHECK_FALSE(all.accepts({0, 3}));
    CHECK(is_infinite(all));

    auto f = PAutomaton::from_configs(3, {{0, 2}, {2, 0}, {1, 5}});
    CHECK(f.accepts({0, 2}));
    CHECK(f.accepts({1, 5}));
    CHECK_FALSE(f.accepts({0, 1}));
    CHECK_FALSE(is_infinite(f));
    CHECK(enumerate_finite(f) == std::vector<Config>{{0, 2}, {1, 5}, {2, 0}});

    PAutomaton loop(1, 1);
    loop.set_accepting(0);
    loop.add_edge(0, 0);
    CHECK(is_infinite(loop));
}

TEST_CASE("pre* examples") {
    auto sym = fixtures::symmetric_walk();
    auto pre = pre_star(sym, single(sym, {0, 0}));
    for (std::uint64_t n : {0, 1, 5, 40}) CHECK(pre.accepts({0, n}));
    CHECK(is_infinite(pre));

    auto up = up_loop();
    auto pu = pre_star(up, single(up, {0, 0}));
    CHECK(pu.accepts({0, 0}));
    for (std::uint64_t n : {1, 2, 9}) CHECK_FALSE(pu.accepts({0, n}));

    auto ao = and_or_row1();
    CHECK(pre_star(ao, single(ao, {ao.id("or_ret0"), 0})).accepts({ao.id("and_init"), 1}));
}

TEST_CASE("post* examples") {
    auto down = fixtures::down_only();
    auto post = post_star(down, single(down, {0, 1}));
    CHECK(post.accepts({0, 0}));
    CHECK(post.accepts({0, 1}));
    CHECK_FALSE(post.accepts({0, 2}));

    auto sym = fixtures::symmetric_walk();
    auto ps = post_star(sym, single(sym, {0, 1}));
    for (std::uint64_t n : {0, 1, 2, 33}) CHECK(ps.accepts({0, n}));

    auto ao = and_or_row1();
    CHECK(is_infinite(post_star(ao, single(ao, {ao.id("and_init"), 1}))));
}

TEST_CASE("intersection") {
    auto sym = fixtures::symmetric_walk();
    auto pre = pre_star(sym, single(sym, {0, 0}));
    auto uni = PAutomaton::all_counters(1, {0});
    auto x = intersect(pre, uni);
    for (std::uint64_t n = 0; n <= 30; ++n) CHECK(x.accepts({0, n}) == pre.accepts({0, n}));
    CHECK(is_infinite(honest_corridor(sym, 0, 0)));

    auto a = PAutomaton::from_configs(1, {{0, 3}});
    auto b = PAutomaton::from_configs(1, {{0, 4}});
    auto ab = intersect(a, b);
    for (std::uint64_t n = 0; n <= 30; ++n) CHECK_FALSE(ab.accepts({0, n}));
    CHECK_FALSE(is_infinite(ab));
}

TEST_CASE("qualitative queries") {
    auto sym = fixtures::symmetric_walk();
    CHECK(positive_pairs(sym) == std::vector<std::vector<bool>>{{true}});
    CHECK(sure_divergers(sym) == std::vector<bool>{false});

    auto up = up_loop();
    CHECK(positive_pairs(up) == std::vector<std::vector<bool>>{{false}});
    CHECK(sure_divergers(up) == std::vector<bool>{true});

    auto ao = and_or_row1();
    auto tp = positive_pairs(ao);
    CHECK(tp[ao.id("and_init")][ao.id("or_ret0")]);
    CHECK(tp[ao.id("and_init")][ao.id("or_ret1")]);
    for (bool b : sure_divergers(ao)) CHECK_FALSE(b);
    CHECK(reach_positive(ao, ao.id("and_init"), ao.id("or_init")));

    Poc two({"p", "q"}, {{0, 0, 0, Rational(1)}, {1, 0, 1, Rational(1)}},
            {{0, +1, 0, Rational(1)}, {1, -1, 1, Rational(1)}});
    CHECK(reach_positive(two, 0, 0));
    CHECK_FALSE(reach_positive(two, 0, 1));
}

TEST_CASE("pre* and post* agree with brute-force search") {
    std::mt19937_64 rng(99);
    constexpr std::uint64_t cap = 20;
    constexpr std::size_t depth = 200;
    for (int i = 0; i < 30; ++i) {
        auto m = fixtures::random_poc(rng, {4, false, 0});
        const auto n = m.num_states();
        for (StateId q = 0; q < n; ++q) {
            auto pre = pre_star(m, single(m, {q, 0}));
            for (StateId p = 0; p < n; ++p) {
                for (std::uint64_t c = 0; c <= 4; ++c) {
                    CHECK(pre.accepts({p, c}) == fixtures::brute_reaches(m, {p, c}, {q, 0}, cap, depth));
                }
            }
        }
        for (StateId p = 0; p < n; ++p) {
            auto post = post_star(m, single(m, {p, 1}));
            auto brute = fixtures::brute_post(m, {{p, 1}}, cap, depth);
            for (StateId q = 0; q < n; ++q) {
                for (std::uint64_t c = 0; c <= 4; ++c) CHECK(post.accepts({q, c}) == (brute.count({q, c}) > 0));
            }
        }
    }
}

TEST_CASE("finite corridors stay within the pumping bound") {
    std::mt19937_64 rng(5);
    int finite = 0;
    for (int i = 0; i < 60; ++i) {
        auto m = fixtures::random_poc(rng, {4, false, 0});
        for (StateId p = 0; p < m.num_states(); ++p) {
            for (StateId q = 0; q < m.num_states(); ++q) {
                auto info = describe(honest_corridor(m, p, q));
                if (!info.finite) continue;
                ++finite;
                auto configs = enumerate_finite(info.automaton);
                CHECK(configs.size() <= pumping_bound(m.num_states()));
                CHECK(info.size_bound.value() == pumping_bound(m.num_states()));
            }
        }
    }
    CHECK(finite > 0);
}
