#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lqrk/scenario.hpp"

using namespace lqrk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("lqrk-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter;
};
int TempDir::counter = 0;

}  // namespace

TEST_CASE("minimal config fills defaults") {
    Scenario s = parse_config(R"({"task": "riccati"})");
    CHECK(s.builtin == Scenario::Builtin::ScalarLq);
    CHECK(s.steps == 200);
    CHECK(s.t0 == 0.0);
    CHECK(s.T == 1.0);
    CHECK(s.seed == 0);
    CHECK(s.ridge == 0.0);
    CHECK(s.a == 0.0);
    CHECK(s.m_weight == 1.0);
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        parse_config(R"({"task": "riccati", "foo": 1})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    CHECK_THROWS_AS(
        parse_config(R"({"task": "riccati", "problem": {"builtin": "scalar-lq", "extra": 1}})"),
        ConfigError);
}

TEST_CASE("task-specific requirements") {
    CHECK_THROWS_AS(parse_config(R"({"task": "wat"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({})"), ConfigError);  // task required
    // interp without targets
    CHECK_THROWS_AS(parse_config(R"({"task": "interp",
        "params": {"y0": [0.0], "points": [0.5]}})"),
                    ConfigError);
    // mayer without terminal spec
    CHECK_THROWS_AS(parse_config(R"({"task": "mayer"})"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"task": "riccati", "grid": {"steps": 1}})"),
                    ConfigError);
}

TEST_CASE("riccati task writes the tanh value") {
    TempDir tmp;
    Scenario s = parse_config(R"({"task": "riccati"})");
    RunOverrides ov;
    ov.out_dir = tmp.path.string();
    CHECK(run_scenario(s, ov) == 0);
    auto diag = nlohmann::json::parse(slurp(tmp.path / "riccati.json"));
    CHECK(diag.at("P_t0_00").get<double>() ==
          doctest::Approx(0.7615942).epsilon(1e-5));
    std::string csv = slurp(tmp.path / "riccati.csv");
    CHECK(csv.substr(0, 6) == "t,p_11");
    CHECK(csv.find('\r') == std::string::npos);  // LF only
}

TEST_CASE("lqr-compare reports a small gap") {
    TempDir tmp;
    Scenario s = parse_config(R"({"task": "lqr-compare",
        "params": {"y0": [1.0]}})");
    RunOverrides ov;
    ov.out_dir = tmp.path.string();
    CHECK(run_scenario(s, ov) == 0);
    auto diag = nlohmann::json::parse(slurp(tmp.path / "lqr-compare.json"));
    CHECK(diag.at("pass").get<bool>());
    CHECK(diag.at("gap").get<double>() <= 1e-3);
}

TEST_CASE("identical config and seed give byte-identical JSON") {
    TempDir t1, t2;
    Scenario s = parse_config(R"({"task": "lqr-compare",
        "problem": {"builtin": "random", "dim": 3},
        "grid": {"steps": 100}, "seed": 42,
        "params": {"y0": [1.0, -0.5, 0.25]}})");
    RunOverrides o1, o2;
    o1.out_dir = t1.path.string();
    o2.out_dir = t2.path.string();
    CHECK(run_scenario(s, o1) == 0);
    CHECK(run_scenario(s, o2) == 0);
    CHECK(slurp(t1.path / "lqr-compare.json") == slurp(t2.path / "lqr-compare.json"));
    CHECK(slurp(t1.path / "lqr-compare.csv") == slurp(t2.path / "lqr-compare.csv"));
}

TEST_CASE("overrides change steps and seed") {
    TempDir tmp;
    Scenario s = parse_config(R"({"task": "riccati", "grid": {"steps": 100}})");
    RunOverrides ov;
    ov.out_dir = tmp.path.string();
    ov.steps = 50;
    CHECK(run_scenario(s, ov) == 0);
    std::string diag = slurp(tmp.path / "riccati.json");
    CHECK(diag.find("\"steps\":50") != std::string::npos);
}

TEST_CASE("mayer and interp tasks run end to end") {
    TempDir tmp;
    Scenario mayer = parse_config(R"({"task": "mayer",
        "problem": {"builtin": "scalar-lq", "m": 0.0},
        "params": {"terminal": {"target": [3.0], "weight": 1.0}}})");
    RunOverrides ov;
    ov.out_dir = tmp.path.string();
    CHECK(run_scenario(mayer, ov) == 0);
    auto diag = nlohmann::json::parse(slurp(tmp.path / "mayer.json"));
    CHECK(diag.at("yT")[0].get<double>() == doctest::Approx(2.0).epsilon(1e-8));

    Scenario interp = parse_config(R"({"task": "interp",
        "problem": {"builtin": "scalar-lq", "m": 0.0},
        "params": {"y0": [0.0], "points": [0.5, 1.0],
                   "targets": [[0.5], [0.0]]}})");
    CHECK(run_scenario(interp, ov) == 0);
    auto idiag = nlohmann::json::parse(slurp(tmp.path / "interp.json"));
    CHECK(idiag.at("coefficients")[0][0].get<double>() ==
          doctest::Approx(2.0).epsilon(1e-8));
    CHECK(idiag.at("coefficients")[1][0].get<double>() ==
          doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("kernel-gram and heat-check exit codes") {
    TempDir tmp;
    RunOverrides ov;
    ov.out_dir = tmp.path.string();
    Scenario gram = parse_config(R"({"task": "kernel-gram",
        "problem": {"builtin": "scalar-lq", "m": 0.0},
        "params": {"points": [0.5, 1.0]}})");
    CHECK(run_scenario(gram, ov) == 0);

    Scenario heat = parse_config(R"({"task": "heat-check",
        "problem": {"builtin": "heat-spectral", "modes": 5,
                    "domain_length": 25.132741228718345, "lambda": 2.0},
        "params": {"s_check": 0.25}})");
    CHECK(run_scenario(heat, ov) == 0);
    auto diag = nlohmann::json::parse(slurp(tmp.path / "heat-check.json"));
    CHECK_FALSE(diag.at("printed_identity_ok").get<bool>());
    CHECK(diag.at("modes").size() == 5);

    // heat-check on the wrong builtin is a config error
    Scenario wrong = parse_config(R"({"task": "heat-check"})");
    CHECK(run_scenario(wrong, ov) == 1);
}

TEST_CASE("invalid problem data maps to exit 1") {
    TempDir tmp;
    RunOverrides ov;
    ov.out_dir = tmp.path.string();
    Scenario bad = parse_config(R"({"task": "riccati",
        "problem": {"builtin": "scalar-lq", "n": 0.0, "nu": 0.5}})");
    CHECK(run_scenario(bad, ov) == 1);
}
