#include "pocan/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = pocan::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string example(const char* name) { return std::string(POCAN_SOURCE_DIR) + "/examples/" + name; }

json run_json(std::vector<std::string> args) {
    args.push_back("--json");
    auto r = run(args);
    REQUIRE(r.code == 0);
    return json::parse(r.out);
}

bool has_keys(const json& j, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (!j.contains(k)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("cli: expected times table for the AND-OR fixture") {
    auto r = run({"exptime", example("andor_row1.poc"), "--abs-err", "1e-3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("E[and_init↓or_ret0] = 11.000") != std::string::npos);
    CHECK(r.out.find("E[and_init↓or_ret1] = 7.667") != std::string::npos);
}

TEST_CASE("cli: validation failure exits with 2") {
    const std::string path = "cli_broken_model.poc";
    std::ofstream(path) << "poc v1\nstate p\nzero p 0 p 1\npos p -1 p 9/10\n";
    auto r = run({"validate", path});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("9/10") != std::string::npos);
    std::remove(path.c_str());
    CHECK(run({"validate", "no_such_file.poc"}).code == 2);
}

TEST_CASE("cli: symmetric walk classification") {
    auto r = run({"classify", example("symmetric.poc")});
    CHECK(r.code == 0);
    CHECK(r.out.find("(p,p): INFINITE / TREND_ZERO_PREPOST_INFINITE") != std::string::npos);
    auto j = run_json({"classify", example("symmetric.poc")});
    REQUIRE(j["results"]["pairs"].size() == 1);
    CHECK(j["results"]["pairs"][0]["verdict"] == "INFINITE");
}

TEST_CASE("cli: exit codes") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate", example("symmetric.poc")}).code == 1);
    CHECK(run({"term"}).code == 1);
    CHECK(run({"term", example("symmetric.poc"), "--rel-err", "2"}).code == 1);
    CHECK(run({"exptime", example("symmetric.poc"), "--mode", "fast"}).code == 1);
    CHECK(run({"term", example("symmetric.poc"), "--from", "nowhere"}).code == 2);
    CHECK(run({"mc", example("symmetric.poc"), "--dra", example("universal.dra")}).code == 2);
    auto rig = run({"exptime", example("andor_row1.poc"), "--mode", "rigorous"});
    CHECK(rig.code == 3);
    CHECK(rig.err.find("RIGOROUS_INFEASIBLE") != std::string::npos);
    CHECK(run({"term", "--help"}).code == 0);
}

TEST_CASE("cli: machine-readable schema") {
    const auto ao = example("andor_row1.poc");
    const auto up = example("up_walk.poc");

    auto term = run_json({"term", ao});
    CHECK(term["command"] == "term");
    CHECK(has_keys(term["model"], {"path", "hash"}));
    for (const auto& p : term["results"]["pairs"]) {
        CHECK(has_keys(p, {"p", "q", "prob", "rel_err"}));
        CHECK(p["prob"].get<double>() >= 0);
        CHECK(p["prob"].get<double>() <= 1);
    }

    auto exp = run_json({"exptime", example("symmetric.poc")});
    REQUIRE(exp["results"]["pairs"].size() == 1);
    CHECK(exp["results"]["pairs"][0]["value"] == "inf");
    CHECK(has_keys(exp["results"]["budget"], {"b_log2", "delta_log2", "mode"}));
    for (const auto& p : run_json({"exptime", ao})["results"]["pairs"]) {
        CHECK(has_keys(p, {"p", "q", "value", "abs_err", "reason"}));
        CHECK(p["value"].get<double>() >= 1);
    }

    auto mc = run_json({"mc", ao, "--dra", example("eventually_one.dra"), "--from", "and_init"});
    CHECK(has_keys(mc["results"], {"probability", "rel_err", "product_states"}));
    CHECK(mc["results"]["probability"].get<double>() == doctest::Approx(0.3).epsilon(1e-5));

    auto div = run_json({"diverge", up, "--from", "p"});
    CHECK(has_keys(div["results"], {"state", "positive", "witness", "lower_bound_log2", "value"}));
    CHECK(div["results"]["positive"] == true);
    CHECK(div["results"]["value"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-6));

    auto bounds = run_json({"bounds", up});
    CHECK_FALSE(bounds["results"]["bounds"].empty());
    for (const auto& b : bounds["results"]["bounds"]) CHECK(has_keys(b, {"name", "inputs", "value_log2"}));

    auto sim = run_json({"simulate", up, "--samples", "2000", "--horizon", "2000"});
    CHECK(has_keys(sim["results"], {"mean", "stderr", "n", "horizon", "seed"}));

    auto an = run_json({"analyze", ao});
    REQUIRE(an["results"]["bsccs"].size() == 1);
    CHECK(an["results"]["bsccs"][0]["trend"] == "1/9");

    auto val = run_json({"validate", ao, "--dra", example("eventually_one.dra")});
    CHECK(val["results"]["states"] == 6);
}

TEST_CASE("cli: reruns give identical machine-readable output") {
    const auto up = example("up_walk.poc");
    for (std::vector<std::string> args : {std::vector<std::string>{"simulate", up, "--samples", "3000", "--horizon", "500"},
                                          std::vector<std::string>{"term", example("andor_row1.poc")},
                                          std::vector<std::string>{"bounds", up}}) {
        args.push_back("--json");
        auto a = run(args);
        auto b = run(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}
