#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "klconst/config.hpp"
#include "klconst/errors.hpp"
#include "klconst/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multi-level non-coherent constellation design and link simulation"};
    std::string mode;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    app.add_option("mode", mode, "design | ser-sweep | kl-check | pack-unitary")->required();
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out, "override the config output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : klconst::kExitConfig;
    }

    klconst::ExperimentConfig cfg;
    try {
        cfg = klconst::load_config(config_path, klconst::parse_mode(mode));
    } catch (const klconst::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return klconst::kExitConfig;
    }
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.output_path = out;
    return klconst::run(cfg, std::cerr);
}
