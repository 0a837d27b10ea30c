#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "lqrk/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lqrk: time-varying LQR via operator-valued kernels"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int steps = -1;
    std::int64_t seed = -1;

    CLI::App* run = app.add_subcommand("run", "execute a scenario config");
    run->add_option("config", config_path, "JSON scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--out-dir", out_dir, "directory for output artifacts");
    run->add_option("--steps", steps, "override grid step count")
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "override random seed")
        ->check(CLI::NonNegativeNumber);

    std::int64_t vseed = 0;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant battery");
    verify->add_option("--seed", vseed, "random seed")
        ->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        lqrk::Scenario s;
        lqrk::RunOverrides ov;
        if (app.got_subcommand(run)) {
            s = lqrk::parse_config_file(config_path);
            ov.out_dir = out_dir;
            if (steps > 0) ov.steps = steps;
            if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
        } else {
            s.task = "verify";
            s.seed = static_cast<std::uint64_t>(vseed);
        }
        return lqrk::run_scenario(s, ov);
    } catch (const lqrk::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
