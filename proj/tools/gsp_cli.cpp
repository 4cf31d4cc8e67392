#include "gsp/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>

int main(int argc, char** argv) {
    CLI::App app{"groundstate positivity experiments"};
    app.require_subcommand(1);

    double grid_scale = 0.0;
    std::uint64_t seed = 0;
    app.add_option("--grid-scale", grid_scale, "grid points per unit length (overrides the config)");
    app.add_option("--seed", seed, "seed for the sampled resolvent probe");

    auto* run = app.add_subcommand("run", "run an experiment config");
    std::string config;
    std::string out_dir;
    run->add_option("config", config, "JSON config")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");

    auto* report = app.add_subcommand("report", "plot data from a sweep file");
    std::string sweep;
    std::string report_dir;
    report->add_option("sweep", sweep, "sweep.csv")->required();
    report->add_option("--out", report_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            gsp::RunOverrides ov;
            if (app.count("--grid-scale")) ov.points_per_unit = grid_scale;
            if (app.count("--seed")) ov.seed = seed;
            if (!out_dir.empty()) ov.output_dir = out_dir;
            const gsp::RunOutcome res = gsp::run_experiment(gsp::load_config(config), ov);
            if (res.exit_code != 0) fmt::print(stderr, "{}\n", res.message);
            else fmt::print("{} rows written\n", res.rows);
            return res.exit_code;
        }
        gsp::write_report(sweep, report_dir);
        return 0;
    } catch (const gsp::Error& e) {
        fmt::print(stderr, "{}\n", e.what());
        return gsp::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
}
