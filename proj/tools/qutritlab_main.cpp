#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qutritlab/experiments.hpp"

namespace {

int run(const std::string& experiment, const std::string& config_path,
        std::optional<std::uint64_t> seed, const std::string& out_dir) {
    nlohmann::json raw = nlohmann::json::object();
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "error: cannot open config file '" << config_path << "'\n";
            return 2;
        }
        try {
            is >> raw;
        } catch (const std::exception& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return 2;
        }
    }
    if (seed) raw["seed"] = *seed;
    if (!out_dir.empty()) raw["out"] = out_dir;

    try {
        qutritlab::ExperimentConfig cfg = qutritlab::parse_config(raw);
        qutritlab::RunReport report = qutritlab::run_experiment(experiment, cfg);
        std::cout << report.experiment << " done (config " << report.config_hash
                  << ")\n";
        for (const auto& f : report.manifest) {
            std::cout << "  wrote " << cfg.out_dir << "/" << f << "\n";
        }
        std::cout << report.summary.dump(2) << "\n";
        return 0;
    } catch (const qutritlab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qutritlab: dispersive readout laboratory for a superconducting qutrit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    std::string chosen;
    for (const std::string& name : qutritlab::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "override the RNG seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->callback([&chosen, name]() { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);
    return run(chosen, config_path, seed, out_dir);
}
