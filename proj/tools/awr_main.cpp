#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "awr/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Waveform relaxation study on the coupled heat benchmark"};

    std::string config_path, methods, materials, schedule, out_path, plot_path, trace_path,
        replay_path, dx;
    int dimension = 0, steps = 0, kmax = 0, repeat = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;
    bool plot = false, table = false;

    app.add_option("--config", config_path, "Read a key = value configuration file first");
    app.add_option("--method", methods,
                   "Comma-separated subset of jacobi,gs-dn,gs-nd,async (default: all)");
    app.add_option("--materials", materials, "air-steel | air-water | water-steel | same");
    app.add_option("--dimension", dimension, "Spatial dimension (1 or 2)");
    app.add_option("--dx", dx, "Mesh width, decimal or a fraction like 1/64");
    app.add_option("--steps", steps, "Number of timesteps per side");
    app.add_option("--tol", tol, "Relative termination tolerance");
    app.add_option("--kmax", kmax, "Iteration cap");
    app.add_option("--schedule", schedule, "free | lockstep | p0-ahead | p1-ahead | seeded");
    app.add_option("--seed", seed, "Seed for the seeded schedule");
    app.add_option("--out", out_path, "CSV output path (appended)");
    app.add_flag("--plot", plot, "Also write an SVG convergence plot");
    app.add_option("--trace", trace_path, "Record the asynchronous schedule to this file");
    app.add_option("--replay", replay_path, "Replay a recorded schedule from this file");
    app.add_option("--repeat", repeat, "Run each method this many times (seeds increment)");
    app.add_flag("--table", table, "Print the relaxation parameter table and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        awr::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = awr::load_config_file(config_path);
        if (app.count("--method")) cfg.set("method", methods);
        if (app.count("--materials")) cfg.set("materials", materials);
        if (app.count("--dimension")) cfg.set("dimension", std::to_string(dimension));
        if (app.count("--dx")) cfg.set("dx", dx);
        if (app.count("--steps")) cfg.set("steps", std::to_string(steps));
        if (app.count("--tol")) cfg.tol = tol;
        if (app.count("--kmax")) cfg.kmax = kmax;
        if (app.count("--schedule")) cfg.set("schedule", schedule);
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--out")) cfg.out_path = out_path;
        if (app.count("--plot")) cfg.plot = plot;
        if (app.count("--trace")) cfg.trace_path = trace_path;
        if (app.count("--replay")) cfg.replay_path = replay_path;
        if (app.count("--repeat")) cfg.repeat = repeat;

        if (table) {
            const double dt = 1e4 / cfg.steps;
            std::cout << awr::print_relax_table(cfg.material_pair, cfg.dx, dt);
            return 0;
        }
        return awr::run_experiment(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
