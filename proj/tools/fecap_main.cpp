#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fecap/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fecap - volatile ferroelectric capacitor simulator"};
    app.set_version_flag("--version", fecap::version_string);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool force = false;
    int jobs = 0;
    long long seed = -1;
    double dt = -1.0;
    std::string fit_input;
    std::string fit_units = "auto";

    const char* names[] = {"landscape", "pund",      "kinetics", "retention",
                           "endurance", "sweep",     "fit"};
    const char* descs[] = {
        "export free-energy landscape curves",
        "continuous PUND measurement and P-V loop",
        "switched polarization over a pulse amplitude/width grid",
        "programmed-state retention vs. delay plus exponential fit",
        "bipolar cycling with PUND checkpoints",
        "retention time-constant map over a width/amplitude grid",
        "fit an exponential decay to an external retention CSV"};

    for (int k = 0; k < 7; ++k) {
        CLI::App* sub = app.add_subcommand(names[k], descs[k]);
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--seed", seed, "override RNG seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--force", force, "overwrite an existing run directory");
        sub->add_option("--jobs", jobs, "worker threads for sweep");
        sub->add_option("--dt", dt, "base time step override [s]");
        if (std::string(names[k]) == "fit") {
            sub->add_option("input", fit_input, "retention CSV to fit")
                ->required();
            sub->add_option("--units", fit_units,
                            "polarization units: auto, C/m2, uC/cm2");
        }
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    fecap::RunConfig config;
    try {
        config = config_path.empty() ? fecap::default_config()
                                     : fecap::parse_config_file(config_path);
        if (seed >= 0) {
            config.seed = (std::uint64_t)seed;
            config.model.ensemble.seed = (std::uint64_t)seed;
        }
        if (dt >= 0.0) config.dt = dt;
    } catch (const std::exception& e) {
        std::cerr << "fecap: config error: " << e.what() << "\n";
        return 1;
    }

    fecap::RunFlags flags;
    flags.out_dir = out_dir;
    flags.force = force;
    flags.jobs = jobs;
    flags.fit_input = fit_input;
    flags.fit_units = fit_units;
    return fecap::run_subcommand(sub, config, flags);
}
