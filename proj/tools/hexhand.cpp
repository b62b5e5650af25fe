#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hexhand/config.hpp"
#include "hexhand/error.hpp"
#include "hexhand/io.hpp"
#include "hexhand/topology.hpp"
#include "hexhand/version.hpp"

int main(int argc, char** argv)
{
    using namespace hexhand;

    CLI::App app{"GPS-assisted 802.11 handoff prediction simulator"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run a scenario (or a parameter sweep) from a config file");
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool sweep = false;
    run_cmd->add_option("config", config_path, "Scenario config file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (overrides out_dir)");
    run_cmd->add_option("--seed", seed, "Master seed (overrides seed)");
    run_cmd->add_flag("--sweep", sweep, "Expand the sweep.* grids");

    auto* genmap_cmd = app.add_subcommand("genmap", "Write a generated hexagonal AP map file");
    int rings = 2;
    double edge = 231.0;
    std::string map_out;
    std::string orientation = "pointy";
    genmap_cmd->add_option("--rings", rings, "Number of rings around the centre cell")->required();
    genmap_cmd->add_option("--edge", edge, "Hexagon edge length in meters")->required();
    genmap_cmd->add_option("--out", map_out, "Output map file")->required();
    genmap_cmd->add_option("--orientation", orientation, "pointy or flat")->check(CLI::IsMember({"pointy", "flat"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*run_cmd) {
        ScenarioConfig cfg;
        try {
            cfg = parse_config(read_file(config_path));
        } catch (const ConfigError& e) {
            std::cerr << config_path << ": " << e.what() << '\n';
            return kExitConfig;
        } catch (const IoError& e) {
            std::cerr << e.what() << '\n';
            return kExitIo;
        }
        if (out_dir)
            cfg.out_dir = *out_dir;
        if (seed)
            cfg.seed = *seed;
        return run(cfg, sweep, std::cerr);
    }

    try {
        write_map_file(map_out, generate_hex_map(rings, edge, parse_orientation(orientation)));
    } catch (const IoError& e) {
        std::cerr << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
