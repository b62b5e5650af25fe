#include "hexhand/config.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include "hexhand/error.hpp"
#include "hexhand/io.hpp"

namespace hexhand {

namespace {

double to_double(std::size_t line, std::string_view key, std::string_view v)
{
    double out = 0;
    if (!parse_double(v, out) || !std::isfinite(out))
        throw ConfigError(line, "malformed number for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

long long to_int(std::size_t line, std::string_view key, std::string_view v)
{
    long long out = 0;
    if (!parse_int(v, out))
        throw ConfigError(line, "malformed integer for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

std::uint64_t to_u64(std::size_t line, std::string_view key, std::string_view v)
{
    unsigned long long out = 0;
    if (!parse_uint64(v, out))
        throw ConfigError(line, "malformed unsigned integer for " + std::string(key) + ": '" + std::string(v) + "'");
    return out;
}

bool to_bool(std::size_t line, std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(line, "malformed boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

std::vector<double> to_list(std::size_t line, std::string_view key, std::string_view v)
{
    std::vector<double> out;
    for (auto item : split(v, ','))
        out.push_back(to_double(line, key, trim(item)));
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (double x : v) {
        if (!out.empty())
            out += ',';
        out += format_double(x);
    }
    return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

using Setter = std::function<void(ScenarioConfig&, std::size_t, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto num = [&t](const char* key, double ScenarioConfig::*field) {
            t[key] = [field](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
                c.*field = to_double(l, k, v);
            };
        };
        auto flag = [&t](const char* key, auto member) {
            t[key] = [member](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
                member(c) = to_bool(l, k, v);
            };
        };
        auto timing = [&t](const char* key, auto member) {
            t[key] = [member](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
                member(c) = to_double(l, k, v);
            };
        };

        t["map_file"] = [](ScenarioConfig& c, std::size_t, std::string_view, std::string_view v) {
            c.map_file = std::string(v);
        };
        t["map_rings"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.map_rings = static_cast<int>(to_int(l, k, v));
        };
        num("edge_m", &ScenarioConfig::edge_m);
        t["orientation"] = [](ScenarioConfig& c, std::size_t l, std::string_view, std::string_view v) {
            try {
                c.orientation = parse_orientation(v);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(l, e.what());
            }
        };
        t["neighbor_threshold_m"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.neighbor_threshold_m = to_double(l, k, v);
        };

        t["trajectory"] = [](ScenarioConfig& c, std::size_t l, std::string_view, std::string_view v) {
            try {
                c.trajectory = parse_trajectory_kind(v);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(l, e.what());
            }
        };
        timing("start_x_m", [](ScenarioConfig& c) -> double& { return c.start.x; });
        timing("start_y_m", [](ScenarioConfig& c) -> double& { return c.start.y; });
        num("heading_deg", &ScenarioConfig::heading_deg);
        num("speed_mps", &ScenarioConfig::speed_mps);
        t["duration_ms"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.duration_ms = to_double(l, k, v);
        };
        t["waypoint"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            const auto parts = to_list(l, k, v);
            if (parts.size() != 3)
                throw ConfigError(l, "waypoint expects x,y,speed");
            c.waypoints.push_back({{parts[0], parts[1]}, parts[2]});
        };
        num("turn_radius_m", &ScenarioConfig::turn_radius_m);
        t["turn"] = [](ScenarioConfig& c, std::size_t l, std::string_view, std::string_view v) {
            if (v != "left" && v != "right")
                throw ConfigError(l, "turn must be 'left' or 'right'");
            c.turn_left = v == "left";
        };
        t["rwp_area_m"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            const auto parts = to_list(l, k, v);
            if (parts.size() != 4)
                throw ConfigError(l, "rwp_area_m expects xmin,ymin,xmax,ymax");
            c.rwp_area_min = {parts[0], parts[1]};
            c.rwp_area_max = {parts[2], parts[3]};
        };
        num("rwp_v_min_mps", &ScenarioConfig::rwp_v_min_mps);
        num("rwp_v_max_mps", &ScenarioConfig::rwp_v_max_mps);
        num("rwp_pause_ms", &ScenarioConfig::rwp_pause_ms);
        t["rwp_seed"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.rwp_seed = to_u64(l, k, v);
        };

        timing("init_duration_ms", [](ScenarioConfig& c) -> double& { return c.predictor.init_duration; });
        timing("sample_period_ms", [](ScenarioConfig& c) -> double& { return c.predictor.sample_period; });
        timing("t_delay_ms", [](ScenarioConfig& c) -> double& { return c.predictor.t_delay; });
        flag("sliding_window", [](ScenarioConfig& c) -> bool& { return c.predictor.sliding_window; });
        flag("scale_error_bounds", [](ScenarioConfig& c) -> bool& { return c.predictor.scale_error_bounds; });
        flag("defer_handoff", [](ScenarioConfig& c) -> bool& { return c.options.defer_handoff; });

        t["n_channels"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.latency.n_channels = static_cast<int>(to_int(l, k, v));
        };
        timing("t_min_ms", [](ScenarioConfig& c) -> double& { return c.latency.t_min; });
        timing("t_max_ms", [](ScenarioConfig& c) -> double& { return c.latency.t_max; });
        timing("per_channel_ms", [](ScenarioConfig& c) -> double& { return c.latency.per_channel; });
        timing("auth_ms", [](ScenarioConfig& c) -> double& { return c.latency.auth; });
        timing("reassoc_ms", [](ScenarioConfig& c) -> double& { return c.latency.reassoc; });

        num("gps_sigma_m", &ScenarioConfig::gps_sigma_m);
        num("gps_correlation_ms", &ScenarioConfig::gps_correlation_ms);

        t["seed"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.seed = to_u64(l, k, v);
        };
        t["out_dir"] = [](ScenarioConfig& c, std::size_t, std::string_view, std::string_view v) {
            c.out_dir = std::string(v);
        };
        t["threads"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.threads = static_cast<unsigned>(to_u64(l, k, v));
        };

        auto grid = [&t](const char* key, std::vector<double> SweepGrid::*field) {
            t[key] = [field](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
                auto values = to_list(l, k, v);
                auto& dst = c.sweep.*field;
                dst.insert(dst.end(), values.begin(), values.end());
            };
        };
        grid("sweep.speed_mps", &SweepGrid::speeds_mps);
        grid("sweep.heading_deg", &SweepGrid::headings_deg);
        grid("sweep.edge_m", &SweepGrid::edges_m);
        t["sweep.seeds"] = [](ScenarioConfig& c, std::size_t l, std::string_view k, std::string_view v) {
            c.sweep.seeds = static_cast<std::size_t>(to_u64(l, k, v));
        };
        return t;
    }();
    return table;
}

bool repeatable(std::string_view key) { return key == "waypoint" || (key.starts_with("sweep.") && key != "sweep.seeds"); }

} // namespace

void validate(const ScenarioConfig& c)
{
    auto check = [](bool ok, const std::string& what) {
        if (!ok)
            throw ConfigError(0, what);
    };
    auto wrap = [](auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(0, e.what());
        }
    };
    check(c.edge_m > 0, "edge_m must be > 0");
    check(c.map_rings >= 0, "map_rings must be >= 0");
    check(!c.neighbor_threshold_m || *c.neighbor_threshold_m >= 0, "neighbor_threshold_m must be >= 0");
    check(c.speed_mps >= 0, "speed_mps must be >= 0");
    check(!c.duration_ms || *c.duration_ms > 0, "duration_ms must be > 0");
    check(c.trajectory != TrajectoryKind::Piecewise || !c.waypoints.empty(), "piecewise trajectory needs waypoints");
    check(c.turn_radius_m > 0, "turn_radius_m must be > 0");
    check(c.rwp_v_min_mps > 0 && c.rwp_v_max_mps >= c.rwp_v_min_mps, "need 0 < rwp_v_min_mps <= rwp_v_max_mps");
    check(c.rwp_pause_ms >= 0, "rwp_pause_ms must be >= 0");
    check(c.sweep.seeds >= 1, "sweep.seeds must be >= 1");
    for (double e : c.sweep.edges_m)
        check(e > 0, "sweep.edge_m values must be > 0");
    for (double s : c.sweep.speeds_mps)
        check(s >= 0, "sweep.speed_mps values must be >= 0");
    check(c.map_file.empty() || c.sweep.edges_m.empty(), "sweep.edge_m cannot be combined with map_file");
    check(c.map_file.empty() || std::filesystem::exists(c.map_file), "map_file does not exist: " + c.map_file);
    wrap([&] { validate(c.predictor); });
    wrap([&] { validate(c.latency); });
    wrap([&] { validate(GpsNoiseModel{c.gps_sigma_m, c.predictor.sample_period, c.gps_correlation_ms}); });
}

ScenarioConfig parse_config(std::string_view text)
{
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        const auto line = trim(raw);
        std::size_t pos = 0;
        while (pos < line.size()) {
            const auto end = std::min(line.find_first_of(" \t", pos), line.size());
            const auto token = line.substr(pos, end - pos);
            pos = std::min(line.find_first_not_of(" \t", end), line.size());

            const auto eq = token.find('=');
            if (eq == std::string_view::npos || eq == 0)
                throw ConfigError(lineno, "expected key=value, got '" + std::string(token) + "'");
            const auto key = token.substr(0, eq);
            const auto value = token.substr(eq + 1);
            const auto it = setters().find(key);
            if (it == setters().end())
                throw ConfigError(lineno, "unknown key '" + std::string(key) + "'");
            if (!repeatable(key) && !seen.emplace(key).second)
                throw ConfigError(lineno, "duplicate key '" + std::string(key) + "'");
            it->second(cfg, lineno, key, value);
        }
    }
    validate(cfg);
    return cfg;
}

std::string render_config(const ScenarioConfig& c)
{
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + '=' + v + '\n'; };
    auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };

    if (!c.map_file.empty())
        kv("map_file", c.map_file);
    kv("map_rings", std::to_string(c.map_rings));
    num("edge_m", c.edge_m);
    kv("orientation", std::string(to_string(c.orientation)));
    if (c.neighbor_threshold_m)
        num("neighbor_threshold_m", *c.neighbor_threshold_m);

    kv("trajectory", std::string(to_string(c.trajectory)));
    num("start_x_m", c.start.x);
    num("start_y_m", c.start.y);
    num("heading_deg", c.heading_deg);
    num("speed_mps", c.speed_mps);
    if (c.duration_ms)
        num("duration_ms", *c.duration_ms);
    for (const auto& w : c.waypoints)
        kv("waypoint", format_double(w.pos.x) + ',' + format_double(w.pos.y) + ',' + format_double(w.speed));
    num("turn_radius_m", c.turn_radius_m);
    kv("turn", c.turn_left ? "left" : "right");
    kv("rwp_area_m", format_double(c.rwp_area_min.x) + ',' + format_double(c.rwp_area_min.y) + ',' +
                         format_double(c.rwp_area_max.x) + ',' + format_double(c.rwp_area_max.y));
    num("rwp_v_min_mps", c.rwp_v_min_mps);
    num("rwp_v_max_mps", c.rwp_v_max_mps);
    num("rwp_pause_ms", c.rwp_pause_ms);
    if (c.rwp_seed)
        kv("rwp_seed", std::to_string(*c.rwp_seed));

    num("init_duration_ms", c.predictor.init_duration);
    num("sample_period_ms", c.predictor.sample_period);
    num("t_delay_ms", c.predictor.t_delay);
    kv("sliding_window", bool_str(c.predictor.sliding_window));
    kv("scale_error_bounds", bool_str(c.predictor.scale_error_bounds));
    kv("defer_handoff", bool_str(c.options.defer_handoff));

    kv("n_channels", std::to_string(c.latency.n_channels));
    num("t_min_ms", c.latency.t_min);
    num("t_max_ms", c.latency.t_max);
    num("per_channel_ms", c.latency.per_channel);
    num("auth_ms", c.latency.auth);
    num("reassoc_ms", c.latency.reassoc);

    num("gps_sigma_m", c.gps_sigma_m);
    num("gps_correlation_ms", c.gps_correlation_ms);

    kv("seed", std::to_string(c.seed));
    kv("out_dir", c.out_dir);
    kv("threads", std::to_string(c.threads));

    if (!c.sweep.speeds_mps.empty())
        kv("sweep.speed_mps", join(c.sweep.speeds_mps));
    if (!c.sweep.headings_deg.empty())
        kv("sweep.heading_deg", join(c.sweep.headings_deg));
    if (!c.sweep.edges_m.empty())
        kv("sweep.edge_m", join(c.sweep.edges_m));
    kv("sweep.seeds", std::to_string(c.sweep.seeds));
    return out;
}

double auto_duration_ms(const ScenarioConfig& cfg, double edge, double speed_mps)
{
    switch (cfg.trajectory) {
    case TrajectoryKind::RandomWaypoint:
        return 60'000.0;
    case TrajectoryKind::Piecewise: {
        double t = 0.0;
        PlanarCoord at = cfg.start;
        for (const auto& w : cfg.waypoints) {
            const double len = distance(at, w.pos);
            if (len > 0 && w.speed > 0)
                t += len / w.speed * 1000.0;
            at = w.pos;
        }
        return std::max(t, cfg.predictor.sample_period);
    }
    case TrajectoryKind::Straight:
    case TrajectoryKind::Arc:
        break;
    }
    if (!(speed_mps > 0))
        throw ConfigError(0, "duration_ms is required for a stationary trajectory");
    return 1.6 * edge / speed_mps * 1000.0;
}

std::vector<Scenario> expand_scenarios(const ScenarioConfig& cfg, bool sweep)
{
    validate(cfg);
    const std::vector<double> edges = sweep && !cfg.sweep.edges_m.empty() ? cfg.sweep.edges_m
                                                                           : std::vector<double>{cfg.edge_m};
    const std::vector<double> headings = sweep && !cfg.sweep.headings_deg.empty()
                                             ? cfg.sweep.headings_deg
                                             : std::vector<double>{cfg.heading_deg};
    const std::vector<double> speeds = sweep && !cfg.sweep.speeds_mps.empty() ? cfg.sweep.speeds_mps
                                                                               : std::vector<double>{cfg.speed_mps};
    const std::size_t seeds = sweep ? cfg.sweep.seeds : 1;

    std::vector<Scenario> out;
    for (double edge : edges) {
        std::shared_ptr<const ApMap> map;
        try {
            map = cfg.map_file.empty() ? std::make_shared<const ApMap>(
                                             generate_hex_map(cfg.map_rings, edge, cfg.orientation,
                                                              cfg.neighbor_threshold_m))
                                       : std::make_shared<const ApMap>(read_map_file(cfg.map_file));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(0, e.what());
        }
        for (double heading : headings)
            for (double speed : speeds)
                for (std::size_t s = 0; s < seeds; ++s) {
                    Scenario sc;
                    sc.map = map;
                    sc.seed = sweep ? derive_seed(cfg.seed, out.size()) : cfg.seed;

                    TrajectorySpec& t = sc.trajectory;
                    t.kind = cfg.trajectory;
                    t.start = cfg.start;
                    t.heading = deg_to_rad(heading);
                    t.speed = speed;
                    t.duration = cfg.duration_ms ? *cfg.duration_ms : auto_duration_ms(cfg, map->edge(), speed);
                    t.waypoints = cfg.waypoints;
                    t.turn_radius = cfg.turn_radius_m;
                    t.turn_left = cfg.turn_left;
                    t.area_min = cfg.rwp_area_min;
                    t.area_max = cfg.rwp_area_max;
                    t.v_min = cfg.rwp_v_min_mps;
                    t.v_max = cfg.rwp_v_max_mps;
                    t.pause = cfg.rwp_pause_ms;
                    t.seed = cfg.rwp_seed ? *cfg.rwp_seed : sc.seed;

                    sc.predictor = cfg.predictor;
                    sc.latency = cfg.latency;
                    sc.noise = {cfg.gps_sigma_m, cfg.predictor.sample_period, cfg.gps_correlation_ms};
                    sc.options = cfg.options;
                    sc.options.record_trace = !sweep;
                    out.push_back(std::move(sc));
                }
    }
    return out;
}

int run(const ScenarioConfig& cfg, bool sweep, std::ostream& err)
{
    namespace fs = std::filesystem;
    std::vector<Scenario> scenarios;
    try {
        scenarios = expand_scenarios(cfg, sweep);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }

    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir)) {
        err << "cannot create output directory " << cfg.out_dir << '\n';
        return kExitIo;
    }
    const fs::path dir(cfg.out_dir);

    try {
        if (!sweep) {
            ScenarioResult res;
            try {
                res = run_scenario(scenarios.front());
            } catch (const std::exception& e) {
                err << "scenario error: " << e.what() << '\n';
                return kExitScenario;
            }
            write_file_atomic((dir / "trace.csv").string(), trace_csv(res.trace));
            write_file_atomic((dir / "events.csv").string(), events_csv(res.events));
            write_file_atomic((dir / "summary.txt").string(), summary_text(res.metrics, cfg.latency));
            return kExitOk;
        }

        const auto res = run_sweep(scenarios, cfg.threads, true);
        std::size_t failed = 0;
        std::string table = "index,edge_m,heading_deg,speed_mps,seed,n_handoffs,accuracy,error\n";
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const auto& sc = scenarios[i];
            const auto& r = res.results[i];
            if (!res.errors[i].empty()) {
                ++failed;
                err << "scenario " << i << ": " << res.errors[i] << '\n';
            }
            table += std::to_string(i) + ',' + format_double(sc.map->edge()) + ',' +
                     format_double(rad_to_deg(sc.trajectory.heading)) + ',' + format_double(sc.trajectory.speed) +
                     ',' + std::to_string(sc.seed) + ',' + (r ? std::to_string(r->metrics.n_handoffs) : "0") + ',' +
                     (r ? format_double(r->metrics.accuracy) : "") + ',' + res.errors[i] + '\n';
        }
        std::string summary = "n_scenarios=" + std::to_string(scenarios.size()) + "\nn_failed=" +
                              std::to_string(failed) + '\n' + summary_text(res.metrics, cfg.latency);
        write_file_atomic((dir / "events.csv").string(), events_csv(res.events));
        write_file_atomic((dir / "scenarios.csv").string(), table);
        write_file_atomic((dir / "summary.txt").string(), summary);
        return failed == scenarios.size() ? kExitScenario : kExitOk;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
}

} // namespace hexhand
