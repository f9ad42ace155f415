#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fiap/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fiap-sim: replica-mean-field point-process simulator and "
                 "verification harness"};
    std::string mode;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int paths = 0;
    int grid = 0;

    app.add_option("mode", mode,
                   "rmf-sim | ph-solve | compare | sweep-M | dfiap-validate")
        ->required();
    app.add_option("--config", config_path, "experiment config file (JSON)")->required();
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--paths", paths, "override n_paths");
    app.add_option("--grid", grid, "override the rate-grid cell count");

    CLI11_PARSE(app, argc, argv);

    try {
        fiap::ExperimentConfig cfg = fiap::ExperimentConfig::from_file(config_path);
        cfg.mode = mode;
        if (app.count("--seed") > 0) {
            cfg.seed = seed;
            cfg.raw["seed"] = seed;
        }
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        if (paths > 0) {
            cfg.n_paths = paths;
            cfg.raw["n_paths"] = paths;
        }
        if (grid > 0) {
            cfg.grid = grid;
            cfg.raw["grid"] = grid;
        }
        return fiap::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
