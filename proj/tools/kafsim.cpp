#include "kaf/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Kernel LMS experiment runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output.path)");
    run->add_option("--runs", runs, "Monte Carlo runs (overrides mc.runs)");
    run->add_option("--seed", seed, "Master seed (overrides mc.seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto cfg = kaf::load_config(config_path);
        if (out_dir) cfg.output_path = *out_dir;
        if (runs) {
            if (*runs == 0) throw kaf::ConfigError({{0, "mc.runs", "must be >= 1"}});
            cfg.mc.runs = *runs;
        }
        if (seed) cfg.mc.seed = *seed;
        const auto result = kaf::run_experiment(cfg);
        kaf::write_artifacts(result, cfg.output_path);
        std::cout << kaf::summary_csv(result);
        return 0;
    } catch (const kaf::ConfigError& e) {
        std::cerr << config_path << ":\n" << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const kaf::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
