#include "pocan/errors.hpp"
#include "pocan/omega.hpp"

#include "support/files.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace pocan;

namespace {

RabinPoc with_pair(Poc m, std::vector<std::size_t> avoid, std::vector<std::size_t> visit) {
    return RabinPoc{std::move(m), {RabinPair{std::move(avoid), std::move(visit)}}};
}

Valuation constant_labels(std::size_t n, const std::string& letter) {
    return Valuation{std::vector<std::string>(n, letter), std::vector<std::string>(n, letter)};
}

}  // namespace

TEST_CASE("product sizes and names") {
    auto file = parse_model(fixtures::read_source_file("examples/andor_row1.poc"));
    REQUIRE(file.valuation);
    auto d = parse_dra(fixtures::read_source_file("examples/eventually_one.dra"));
    auto prod = product(file.poc, *file.valuation, d);
    CHECK(prod.rp.poc.num_states() == 12);
    CHECK(prod.rp.poc.pos_rules().size() == 24);
    CHECK(prod.rp.poc.name(prod.initial(0, d)) == "and_init@q_other");
    REQUIRE(prod.rp.pairs.size() == 1);
    CHECK(prod.rp.pairs[0].avoid.size() == 6);

    auto bad = constant_labels(6, "zzz");
    CHECK_THROWS_AS(product(file.poc, bad, d), ValidationError);
}

TEST_CASE("consistency flags") {
    auto m = fixtures::symmetric_walk();
    CHECK(consistency_partition(with_pair(m, {}, {0})) == std::vector{BsccFlag::Consistent});
    CHECK(consistency_partition(with_pair(m, {0}, {0})) == std::vector{BsccFlag::Inconsistent});

    Poc two({"x", "y"}, {{0, 0, 0, Rational(1)}, {1, 0, 1, Rational(1)}},
            {{0, 1, 1, Rational(1, 2)}, {0, -1, 0, Rational(1, 2)}, {1, -1, 0, Rational(1)}});
    CHECK(consistency_partition(with_pair(two, {0}, {1})) == std::vector{BsccFlag::Inconsistent});
}

TEST_CASE("freezing") {
    auto m = fixtures::walk(Rational(3, 5));
    auto same = freeze(with_pair(m, {}, {0}), BsccFlag::Inconsistent);
    CHECK(same == m);
    auto frozen = freeze(with_pair(m, {}, {0}), BsccFlag::Consistent);
    REQUIRE(frozen.pos_rules().size() == 1);
    CHECK(frozen.pos_rules()[0].delta == -1);
    CHECK(nonterm_prob(frozen, 0, Rational(1, 1000)).value == 0.0);

    // Two BSCCs reached from a transient start; only the flagged one changes.
    Poc m2({"s", "a", "b"}, {{0, 0, 0, Rational(1)}, {1, 0, 1, Rational(1)}, {2, 0, 2, Rational(1)}},
           {{0, 0, 1, Rational(1, 2)}, {0, 0, 2, Rational(1, 2)}, {1, 1, 1, Rational(1)}, {2, 1, 2, Rational(1)}});
    auto f2 = freeze(with_pair(m2, {}, {1}), BsccFlag::Inconsistent);
    for (const auto& r : f2.pos_rules()) {
        if (r.src == 2) CHECK(r.delta == -1);
        if (r.src == 1) CHECK(r.delta == 1);
    }
}

TEST_CASE("divergence witnesses and gap bound") {
    auto up = fixtures::walk(Rational(3, 5));
    auto info = divergence(up, 0);
    CHECK(info.positive);
    CHECK(info.kind == WitnessKind::PositiveTrendBscc);
    CHECK(info.lower_bound == Rational(1, 96000));

    CHECK_FALSE(divergence(fixtures::walk(Rational(2, 5)), 0).positive);
    CHECK_FALSE(divergence(fixtures::symmetric_walk(), 0).positive);

    auto only_up = divergence(fixtures::up_only(), 0);
    CHECK(only_up.positive);
    CHECK(only_up.kind == WitnessKind::SureDiverger);
    CHECK(only_up.lower_bound == 1);
}

TEST_CASE("non-termination probabilities") {
    auto v = nonterm_prob(fixtures::walk(Rational(3, 5)), 0, Rational(1, 1000000));
    CHECK(std::abs(v.value - 1.0 / 3) <= 1e-6 / 3);
    CHECK(nonterm_prob(fixtures::walk(Rational(2, 5)), 0, Rational(1, 1000000)).value == 0.0);
    CHECK(nonterm_prob(fixtures::symmetric_walk(), 0, Rational(1, 1000000)).value == 0.0);
}

TEST_CASE("chain G of the up-biased walk") {
    auto rp = with_pair(fixtures::walk(Rational(3, 5)), {}, {0});
    auto g = build_chain_g(rp, Rational(1, 1000000));
    const auto p1 = ChainG::at(0, 1);
    bool has_acc = false;
    for (const auto& [t, w] : g.trans[p1]) {
        if (t == g.acc()) {
            has_acc = true;
            CHECK(std::abs(w.get_d() - 1.0 / 3) < 1e-6);
        }
        CHECK(t != g.rej());
    }
    CHECK(has_acc);
    double row = 0;
    for (const auto& [t, w] : g.trans[p1]) row += w.get_d();
    CHECK(std::abs(row - 1) <= 2e-6);
    auto reach = good_bscc_reach(g);
    CHECK(reach[g.acc()] == 1.0);
    CHECK(reach[g.rej()] == 0.0);
}

TEST_CASE("almost-surely terminating model has no rej edges") {
    auto rp = with_pair(fixtures::walk(Rational(2, 5)), {}, {0});
    auto g = build_chain_g(rp, Rational(1, 1000));
    for (const auto& row : g.trans) {
        for (const auto& [t, w] : row) {
            if (&row != &g.trans[g.rej()]) CHECK(t != g.rej());
        }
    }
}

TEST_CASE("AND-OR acceptance equals the or_ret1 termination probability") {
    auto file = parse_model(fixtures::read_source_file("examples/andor_row1.poc"));
    auto d = parse_dra(fixtures::read_source_file("examples/eventually_one.dra"));
    auto r = model_check(file.poc, *file.valuation, d, Config{0, 1}, Rational(1, 1000));
    CHECK(std::abs(r.probability - 0.3) <= 0.3e-3);
    CHECK_FALSE(r.qualitative);

    auto u = parse_dra(fixtures::read_source_file("examples/universal.dra"));
    auto ru = model_check(file.poc, *file.valuation, u, Config{0, 1}, Rational(1, 1000));
    CHECK(ru.probability == 1.0);
    CHECK(ru.qualitative);
}

TEST_CASE("never-accepting condition gives zero") {
    auto d = parse_dra("dra v1\nalphabet a\nstate q\ninit q\ntrans q a q\npair E q ; F\n");
    auto m = fixtures::walk(Rational(3, 5));
    auto r = model_check(m, constant_labels(1, "a"), d, Config{0, 1}, Rational(1, 100));
    CHECK(r.probability == 0.0);
}

TEST_CASE("rigorous and adaptive modes agree on the up-biased walk") {
    auto m = fixtures::walk(Rational(3, 5));
    Valuation val{{"zero"}, {"pos"}};
    // Accept runs that stay at a positive counter forever.
    auto d = parse_dra("dra v1\nalphabet zero pos\nstate z s\ninit z\n"
                       "trans z zero z\ntrans z pos s\ntrans s zero z\ntrans s pos s\npair E z ; F s\n");
    auto a = model_check(m, val, d, Config{0, 1}, Rational(1, 10000));
    auto r = model_check(m, val, d, Config{0, 1}, Rational(1, 10000), McMode::Rigorous);
    CHECK(std::abs(a.probability - 1.0 / 3) <= 1e-4 / 3);
    CHECK(std::abs(r.probability - 1.0 / 3) <= 1e-4 / 3);
}
