#include "dflow/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"dflow: numerical laboratory for a fourth-order dispersive flow on the sphere"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    uint64_t seed = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--set", overrides, "dotted key=value overrides, repeatable");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
            have_seed = true;
        });
    };

    const char* names[] = {"flow",       "linear", "energy_audit", "epsilon_sweep",
                           "delta_sweep", "twin",   "smoothing",    "commutator"};
    for (const char* n : names) add_common(app.add_subcommand(n));

    CLI11_PARSE(app, argc, argv);
    std::string sub = app.get_subcommands().front()->get_name();

    try {
        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw dflow::Error("cannot open config file: " + config_path);
            doc = nlohmann::json::parse(f);
        }
        doc["experiment"] = sub;
        for (const auto& ov : overrides) dflow::apply_override(doc, ov);
        if (!out_dir.empty()) doc["output_dir"] = out_dir;
        if (have_seed) doc["seed"] = seed;
        dflow::ExperimentConfig cfg = dflow::config_from_json(doc);
        dflow::run_experiment(cfg);
        std::cout << "ok: artifacts in " << cfg.output_dir << std::endl;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
