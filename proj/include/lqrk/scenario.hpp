#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lqrk/core.hpp"

namespace lqrk {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed scenario configuration. One scenario per process invocation.
struct Scenario {
    enum class Builtin { ScalarLq, Random, HeatSpectral };
    Builtin builtin = Builtin::ScalarLq;

    // scalar-lq parameters
    double a = 0.0, b = 1.0, m_weight = 1.0, n_weight = 1.0, j0 = 1.0, nu = 0.5;
    // random parameters
    int dim = 4, control_dim = 0;  // control_dim 0 = same as dim
    double j0_scale = 1.0;
    // heat-spectral parameters
    int modes = 5;
    double domain_length = 2.0 * 3.14159265358979323846;
    double lambda = 1.0;

    double t0 = 0.0, T = 1.0;
    int steps = 200;

    std::string task;  // riccati | kernel-gram | lqr-compare | mayer | interp
                       // | heat-check | verify

    std::vector<double> y0;
    std::vector<double> points;
    std::vector<std::vector<double>> targets;
    double ridge = 0.0;
    bool has_terminal = false;
    std::vector<double> terminal_target;
    double terminal_weight = 1.0;
    double s_check = 0.25;
    std::string gram_which = "K";

    std::uint64_t seed = 0;
    std::string csv_path;
    std::string json_path;

    // tolerance overrides
    double tol_gap = 1e-3;       // lqr-compare trajectory gap
    double tol_identity = 1e-6;  // heat-check change-of-variables gap
};

// Strict JSON parsing: unknown keys are rejected with their key path.
Scenario parse_config(const std::string& text);
Scenario parse_config_file(const std::string& path);

struct RunOverrides {
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::string out_dir;  // directory for default artifact names
};

// Executes the task and writes the CSV/JSON artifacts.
// Exit status: 0 success, 2 numerical failure, 3 verification failure.
// (Invalid configuration is reported by parse_config via ConfigError.)
int run_scenario(const Scenario& s, const RunOverrides& ov = {});

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

// Full invariant battery used by the `verify` task.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed);

}  // namespace lqrk
