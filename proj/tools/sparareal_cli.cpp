#include <CLI11.hpp>

#include <iostream>

#include "sparareal/harness.hpp"

int main(int argc, char** argv) {
    using namespace sparareal;

    CLI::App app{"Parareal and stochastic Parareal experiments for scalar SDEs"};
    app.require_subcommand(1);

    std::string config_file;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t runs = 0;
    unsigned threads = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_file, "key = value configuration file")->required();
        cmd->add_option("--seed", seed, "base seed for the Brownian and sampling streams");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--runs", runs, "number of independent runs")->check(CLI::PositiveNumber);
        cmd->add_option("--threads", threads, "worker threads (does not change results)")
            ->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "run the configured solver and write errors.csv, iterations.csv");
    auto* bounds = app.add_subcommand("bounds", "write the mean-square bound curves to bounds.csv");
    auto* gen = app.add_subcommand("gen-paths", "write the Brownian table to paths.bwt");
    for (auto* cmd : {run, bounds, gen}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    auto* chosen = app.get_subcommands().front();
    Overrides overrides;
    if (chosen->count("--seed") > 0) overrides.seed = seed;
    if (chosen->count("--out") > 0) overrides.out = out_dir;
    if (chosen->count("--runs") > 0) overrides.runs = runs;
    if (chosen->count("--threads") > 0) overrides.threads = threads;

    if (chosen == run) return run_experiment(config_file, overrides, std::cerr);
    if (chosen == bounds) return run_bounds(config_file, overrides, std::cerr);
    return run_gen_paths(config_file, overrides, std::cerr);
}
