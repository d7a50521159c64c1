// mbath command-line runner: steady-state thermodynamics sweeps for a
// multilevel system moving through a thermal scalar bath.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mbath/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Doppler-modified thermal bath: steady states, clocks, batteries"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment sweep");
    std::string experiment, config_path, out_path, format;
    std::optional<std::uint64_t> seed;
    run->add_option("--experiment", experiment,
                    "fig1|fig2|fig4|sweep|selftest");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--seed", seed, "RNG seed (enables Gillespie columns)");
    run->add_option("--out", out_path, "output path (default stdout)");
    run->add_option("--format", format, "csv|json");

    CLI11_PARSE(app, argc, argv);

    try {
        mbath::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = mbath::ExperimentConfig::load(config_path);
        } else if (!experiment.empty()) {
            cfg.experiment = experiment;
        } else {
            std::cerr << "error: need --experiment or --config\n";
            return 2;
        }
        // flags override config fields
        if (!experiment.empty()) cfg.experiment = experiment;
        if (seed) cfg.seed = seed;
        if (!out_path.empty()) cfg.output = out_path;
        if (!format.empty()) cfg.format = format;
        cfg.validate();

        if (cfg.experiment == "selftest") {
            const auto rep = mbath::run_selftest(cfg.seed);
            for (const auto& c : rep.checks)
                std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name
                          << "  (tolerance " << c.tolerance << "): " << c.detail
                          << "\n";
            std::cout << (rep.all_pass() ? "selftest: all checks passed"
                                         : "selftest: FAILURES present")
                      << "\n";
            return rep.all_pass() ? 0 : 1;
        }

        mbath::Table table;
        if (cfg.experiment == "fig1") table = mbath::run_fig1(cfg);
        else if (cfg.experiment == "fig2") table = mbath::run_fig2(cfg);
        else if (cfg.experiment == "fig4") table = mbath::run_fig4(cfg);
        else table = mbath::run_sweep(cfg);
        mbath::write_table(table, cfg);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
