#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hexhand/mobility.hpp"
#include "hexhand/predictor.hpp"
#include "hexhand/simulator.hpp"
#include "hexhand/topology.hpp"

namespace hexhand {

/// Parameter grids declared with `sweep.<param>=` lines. Empty lists fall
/// back to the scalar setting.
struct SweepGrid {
    std::vector<double> speeds_mps;
    std::vector<double> headings_deg;
    std::vector<double> edges_m;
    std::size_t seeds = 1;

    friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

/// Everything a run needs, in the units used by the config file.
struct ScenarioConfig {
    // Map: a file, or a generated ring-K grid.
    std::string map_file;
    int map_rings = 2;
    double edge_m = 231.0;
    Orientation orientation = Orientation::Pointy;
    std::optional<double> neighbor_threshold_m;

    TrajectoryKind trajectory = TrajectoryKind::Straight;
    PlanarCoord start{};
    double heading_deg = 0.0;
    double speed_mps = 19.0222;
    std::optional<double> duration_ms; // none = derived from the cell size
    std::vector<Waypoint> waypoints;
    double turn_radius_m = 100.0;
    bool turn_left = true;
    PlanarCoord rwp_area_min{-500.0, -500.0};
    PlanarCoord rwp_area_max{500.0, 500.0};
    double rwp_v_min_mps = 5.0;
    double rwp_v_max_mps = 30.0;
    double rwp_pause_ms = 0.0;
    std::optional<std::uint64_t> rwp_seed;

    PredictorConfig predictor;
    LatencyModel latency;
    double gps_sigma_m = 0.3;
    double gps_correlation_ms = 60'000.0;
    SimulationOptions options;

    std::uint64_t seed = 1;
    std::string out_dir = ".";
    unsigned threads = 0;

    SweepGrid sweep;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses flat `key=value` text (several pairs per line allowed, `#`
/// comments). Throws ConfigError with the offending line on unknown keys,
/// malformed values or violated invariants.
ScenarioConfig parse_config(std::string_view text);

/// Inverse of parse_config.
std::string render_config(const ScenarioConfig& cfg);

/// Throws ConfigError when the config is internally inconsistent.
void validate(const ScenarioConfig& cfg);

/// Duration used when none is configured: time to travel 1.6 cell edges
/// (one boundary crossing from the centre cell), or a minute for random
/// waypoint paths.
double auto_duration_ms(const ScenarioConfig& cfg, double edge, double speed_mps);

/// One scenario, or the Cartesian product of the sweep grids
/// (edge-major, then heading, speed, seed index).
std::vector<Scenario> expand_scenarios(const ScenarioConfig& cfg, bool sweep);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitScenario = 3, kExitIo = 4 };

/// Runs a single scenario or a sweep and writes trace.csv / events.csv /
/// summary.txt into cfg.out_dir. Diagnostics go to `err`.
int run(const ScenarioConfig& cfg, bool sweep, std::ostream& err);

} // namespace hexhand
