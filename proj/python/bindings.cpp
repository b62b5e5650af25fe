#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hexhand/config.hpp"
#include "hexhand/error.hpp"
#include "hexhand/geo.hpp"
#include "hexhand/mobility.hpp"
#include "hexhand/predictor.hpp"
#include "hexhand/simulator.hpp"
#include "hexhand/topology.hpp"
#include "hexhand/version.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace hexhand;

namespace {

void add_geo(py::module_& m)
{
    py::class_<GeoCoord>(m, "GeoCoord")
        .def(py::init<>())
        .def(py::init([](double lat, double lon) { return GeoCoord{lat, lon}; }), "lat"_a, "lon"_a)
        .def_readwrite("lat", &GeoCoord::lat)
        .def_readwrite("lon", &GeoCoord::lon)
        .def(py::self == py::self)
        .def("__repr__", [](const GeoCoord& c) {
            return "GeoCoord(lat=" + std::to_string(c.lat) + ", lon=" + std::to_string(c.lon) + ")";
        });

    py::class_<PlanarCoord>(m, "PlanarCoord")
        .def(py::init<>())
        .def(py::init([](double x, double y) { return PlanarCoord{x, y}; }), "x"_a, "y"_a)
        .def_readwrite("x", &PlanarCoord::x)
        .def_readwrite("y", &PlanarCoord::y)
        .def(py::self == py::self)
        .def("__repr__", [](const PlanarCoord& p) {
            return "PlanarCoord(x=" + std::to_string(p.x) + ", y=" + std::to_string(p.y) + ")";
        });

    py::class_<GpsNoiseModel>(m, "GpsNoiseModel")
        .def(py::init<>())
        .def_readwrite("sigma", &GpsNoiseModel::sigma)
        .def_readwrite("sample_period", &GpsNoiseModel::sample_period)
        .def_readwrite("correlation_time", &GpsNoiseModel::correlation_time);

    py::class_<GpsNoiseState>(m, "GpsNoiseState").def(py::init<std::uint64_t>(), "seed"_a);

    m.attr("EARTH_RADIUS") = kEarthRadius;
    m.def("haversin", &haversin, "delta"_a);
    m.def("haversine_distance", &haversine_distance, "a"_a, "b"_a, "radius"_a = kEarthRadius);
    m.def("movement_detected", &movement_detected, "prev"_a, "cur"_a);
    m.def("geo_to_planar", &geo_to_planar, "p"_a, "origin"_a);
    m.def("planar_to_geo", &planar_to_geo, "p"_a, "origin"_a);
    m.def("gps_fix", &gps_fix, "true_pos"_a, "model"_a, "state"_a);
}

void add_topology(py::module_& m)
{
    py::enum_<Orientation>(m, "Orientation")
        .value("POINTY", Orientation::Pointy)
        .value("FLAT", Orientation::Flat);

    py::class_<HexCell>(m, "HexCell")
        .def(py::init([](PlanarCoord c, double edge, Orientation o) { return HexCell{c, edge, o}; }), "center"_a,
             "edge"_a, "orientation"_a = Orientation::Pointy)
        .def_readwrite("center", &HexCell::center)
        .def_readwrite("edge", &HexCell::edge)
        .def_readwrite("orientation", &HexCell::orientation)
        .def("vertices", [](const HexCell& c) { return vertices(c); });

    py::class_<AccessPoint>(m, "AccessPoint")
        .def(py::init<>())
        .def(py::init([](std::string bssid, int channel, PlanarCoord center, std::string ssid, std::string prefix) {
                 return AccessPoint{std::move(bssid), channel, center, std::move(ssid), std::move(prefix)};
             }),
             "bssid"_a, "channel"_a, "center"_a, "ssid"_a = "", "prefix"_a = "")
        .def_readwrite("bssid", &AccessPoint::bssid)
        .def_readwrite("channel", &AccessPoint::channel)
        .def_readwrite("center", &AccessPoint::center)
        .def_readwrite("ssid", &AccessPoint::ssid)
        .def_readwrite("prefix", &AccessPoint::prefix)
        .def("__repr__", [](const AccessPoint& a) { return "AccessPoint(" + a.bssid + ")"; });

    py::class_<ApMap>(m, "ApMap")
        .def(py::init<std::vector<AccessPoint>, double, Orientation, std::optional<double>>(), "aps"_a, "edge"_a,
             "orientation"_a = Orientation::Pointy, "neighbor_threshold"_a = py::none())
        .def_property_readonly("aps", &ApMap::aps)
        .def_property_readonly("edge", &ApMap::edge)
        .def_property_readonly("orientation", &ApMap::orientation)
        .def_property_readonly("neighbor_threshold", &ApMap::neighbor_threshold)
        .def("cell", py::overload_cast<std::size_t>(&ApMap::cell, py::const_), "index"_a)
        .def("__len__", &ApMap::size);

    py::class_<MonitorSample>(m, "MonitorSample")
        .def(py::init([](PlanarCoord p, std::string bssid, int channel, double rssi) {
                 return MonitorSample{p, std::move(bssid), channel, rssi};
             }),
             "position"_a, "bssid"_a, "channel"_a, "rssi"_a)
        .def_readwrite("position", &MonitorSample::position)
        .def_readwrite("bssid", &MonitorSample::bssid)
        .def_readwrite("channel", &MonitorSample::channel)
        .def_readwrite("rssi", &MonitorSample::rssi);

    m.def("contains", &contains, "cell"_a, "p"_a);
    m.def("distance_to_boundary", &distance_to_boundary, "cell"_a, "p"_a);
    m.def("generate_hex_map", &generate_hex_map, "rings"_a, "edge"_a, "orientation"_a = Orientation::Pointy,
          "neighbor_threshold"_a = py::none());
    m.def(
        "cell_of",
        [](const ApMap& map, PlanarCoord p) -> std::optional<AccessPoint> {
            if (const auto* ap = cell_of(map, p))
                return *ap;
            return std::nullopt;
        },
        "map"_a, "p"_a);
    m.def("neighbors", &neighbors, "map"_a, "p"_a);
    m.def(
        "build_map_from_monitor_trace",
        [](const std::vector<MonitorSample>& samples, double edge, Orientation o) {
            return build_map_from_monitor_trace(samples, edge, o);
        },
        "samples"_a, "edge"_a, "orientation"_a = Orientation::Pointy);
    m.def("parse_map", &parse_map, "text"_a);
    m.def("render_map", &render_map, "map"_a);
}

void add_predictor(py::module_& m)
{
    py::class_<PredictorConfig>(m, "PredictorConfig")
        .def(py::init<>())
        .def_readwrite("init_duration", &PredictorConfig::init_duration)
        .def_readwrite("sample_period", &PredictorConfig::sample_period)
        .def_readwrite("t_delay", &PredictorConfig::t_delay)
        .def_readwrite("sliding_window", &PredictorConfig::sliding_window)
        .def_readwrite("scale_error_bounds", &PredictorConfig::scale_error_bounds);

    py::class_<PredictorState>(m, "PredictorState")
        .def_readonly("intervals", &PredictorState::intervals)
        .def_readonly("last_pos", &PredictorState::last_pos)
        .def_readonly("elapsed", &PredictorState::elapsed)
        .def_readonly("cum_distance", &PredictorState::cum_distance)
        .def_readonly("cum_dx", &PredictorState::cum_dx)
        .def_readonly("cum_dy", &PredictorState::cum_dy)
        .def_readonly("pe_x", &PredictorState::pe_x)
        .def_readonly("ne_x", &PredictorState::ne_x)
        .def_readonly("pe_y", &PredictorState::pe_y)
        .def_readonly("ne_y", &PredictorState::ne_y)
        .def_readonly("last_error", &PredictorState::last_error);

    py::class_<PredictedRange>(m, "PredictedRange")
        .def(py::init([](double xl, double xh, double yl, double yh) { return PredictedRange{xl, xh, yl, yh}; }),
             "x_lo"_a, "x_hi"_a, "y_lo"_a, "y_hi"_a)
        .def_readwrite("x_lo", &PredictedRange::x_lo)
        .def_readwrite("x_hi", &PredictedRange::x_hi)
        .def_readwrite("y_lo", &PredictedRange::y_lo)
        .def_readwrite("y_hi", &PredictedRange::y_hi)
        .def("center", &PredictedRange::center)
        .def("contains", &PredictedRange::contains, "p"_a);

    m.def("start_predictor", &start_predictor, "first_fix"_a, "start_time"_a = 0.0);
    m.def("ingest_sample", &ingest_sample, "state"_a, "pos"_a, "cfg"_a);
    m.def("initialized", &initialized, "state"_a, "cfg"_a);
    m.def("average_speed", &average_speed, "state"_a, "cfg"_a);
    m.def("trigger_distance", &trigger_distance, "state"_a, "cfg"_a);
    m.def(
        "coordinate_rates",
        [](const PredictorState& s, const PredictorConfig& c) {
            const auto r = coordinate_rates(s, c);
            return py::make_tuple(r.x, r.y);
        },
        "state"_a, "cfg"_a);
    m.def("update_error_bounds", &update_error_bounds, "state"_a, "predicted_next"_a, "actual_next"_a);
    m.def("predicted_range", &predicted_range, "state"_a, "cfg"_a);
    m.def("candidate_aps", &candidate_aps, "range"_a, "map"_a, "current_bssid"_a = "");
    m.def("should_trigger", &should_trigger, "state"_a, "cell"_a, "cfg"_a);
}

void add_mobility(py::module_& m)
{
    py::enum_<TrajectoryKind>(m, "TrajectoryKind")
        .value("STRAIGHT", TrajectoryKind::Straight)
        .value("PIECEWISE", TrajectoryKind::Piecewise)
        .value("RANDOM_WAYPOINT", TrajectoryKind::RandomWaypoint)
        .value("ARC", TrajectoryKind::Arc);

    py::class_<Waypoint>(m, "Waypoint")
        .def(py::init([](PlanarCoord p, double speed) { return Waypoint{p, speed}; }), "pos"_a, "speed"_a)
        .def_readwrite("pos", &Waypoint::pos)
        .def_readwrite("speed", &Waypoint::speed);

    py::class_<TrajectorySpec>(m, "TrajectorySpec")
        .def(py::init<>())
        .def_readwrite("kind", &TrajectorySpec::kind)
        .def_readwrite("start", &TrajectorySpec::start)
        .def_readwrite("heading", &TrajectorySpec::heading)
        .def_readwrite("speed", &TrajectorySpec::speed)
        .def_readwrite("duration", &TrajectorySpec::duration)
        .def_readwrite("waypoints", &TrajectorySpec::waypoints)
        .def_readwrite("turn_radius", &TrajectorySpec::turn_radius)
        .def_readwrite("turn_left", &TrajectorySpec::turn_left)
        .def_readwrite("area_min", &TrajectorySpec::area_min)
        .def_readwrite("area_max", &TrajectorySpec::area_max)
        .def_readwrite("v_min", &TrajectorySpec::v_min)
        .def_readwrite("v_max", &TrajectorySpec::v_max)
        .def_readwrite("pause", &TrajectorySpec::pause)
        .def_readwrite("seed", &TrajectorySpec::seed);

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<TrajectorySpec>(), "spec"_a)
        .def_property_readonly("duration", &Trajectory::duration)
        .def("position_at", &Trajectory::position_at, "t"_a)
        .def("heading_at", &Trajectory::heading_at, "t"_a);
}

void add_simulator(py::module_& m)
{
    py::class_<LatencyModel>(m, "LatencyModel")
        .def(py::init<>())
        .def_readwrite("n_channels", &LatencyModel::n_channels)
        .def_readwrite("t_min", &LatencyModel::t_min)
        .def_readwrite("t_max", &LatencyModel::t_max)
        .def_readwrite("per_channel", &LatencyModel::per_channel)
        .def_readwrite("auth", &LatencyModel::auth)
        .def_readwrite("reassoc", &LatencyModel::reassoc);

    py::class_<HandoffEvent>(m, "HandoffEvent")
        .def_readonly("t", &HandoffEvent::t)
        .def_readonly("mn_pos", &HandoffEvent::mn_pos)
        .def_readonly("predicted", &HandoffEvent::predicted)
        .def_readonly("candidates", &HandoffEvent::candidates)
        .def_readonly("actual_next", &HandoffEvent::actual_next)
        .def_readonly("correct", &HandoffEvent::correct)
        .def_readonly("fallback", &HandoffEvent::fallback)
        .def_readonly("n_scanned", &HandoffEvent::n_scanned)
        .def_readonly("latency_selective", &HandoffEvent::latency_selective)
        .def_readonly("latency_full", &HandoffEvent::latency_full);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("n_handoffs", &Metrics::n_handoffs)
        .def_readonly("accuracy", &Metrics::accuracy)
        .def_readonly("two_ap_fraction", &Metrics::two_ap_fraction)
        .def_readonly("fallback_fraction", &Metrics::fallback_fraction)
        .def_readonly("mean_latency_selective", &Metrics::mean_latency_selective)
        .def_readonly("median_latency_selective", &Metrics::median_latency_selective)
        .def_readonly("mean_latency_full", &Metrics::mean_latency_full)
        .def_readonly("median_latency_full", &Metrics::median_latency_full)
        .def_readonly("reduction_ratio", &Metrics::reduction_ratio);

    py::class_<SimulationOptions>(m, "SimulationOptions")
        .def(py::init<>())
        .def_readwrite("defer_handoff", &SimulationOptions::defer_handoff)
        .def_readwrite("record_trace", &SimulationOptions::record_trace);

    py::class_<ScenarioResult>(m, "ScenarioResult")
        .def_readonly("events", &ScenarioResult::events)
        .def_readonly("metrics", &ScenarioResult::metrics)
        .def_property_readonly("trace_csv", [](const ScenarioResult& r) { return trace_csv(r.trace); })
        .def_property_readonly("events_csv", [](const ScenarioResult& r) { return events_csv(r.events); });

    m.def(
        "scan_latency_bounds",
        [](const LatencyModel& lm, int n) {
            const auto b = scan_latency_bounds(lm, n);
            return py::make_tuple(b.lo, b.hi);
        },
        "model"_a, "n"_a);
    m.def("handoff_latency", &handoff_latency, "model"_a, "n_scanned"_a);
    m.def(
        "run_scenario",
        [](const Trajectory& traj, const ApMap& map, const PredictorConfig& cfg, const LatencyModel& lm,
           const GpsNoiseModel& noise, std::uint64_t seed, const SimulationOptions& opts) {
            py::gil_scoped_release release;
            return run_scenario(traj, map, cfg, lm, noise, seed, opts);
        },
        "trajectory"_a, "map"_a, "cfg"_a = PredictorConfig{}, "latency"_a = LatencyModel{},
        "noise"_a = GpsNoiseModel{}, "seed"_a = 1, "options"_a = SimulationOptions{});
    m.def(
        "run_config_sweep",
        [](const std::string& config_text, bool sweep) {
            const auto cfg = parse_config(config_text);
            const auto scenarios = expand_scenarios(cfg, sweep);
            py::gil_scoped_release release;
            return run_sweep(scenarios, cfg.threads).metrics;
        },
        "config_text"_a, "sweep"_a = true, "Parse a config and run its scenario grid; returns aggregated metrics.");
    m.def(
        "summary_text", [](const Metrics& mt, const LatencyModel& lm) { return summary_text(mt, lm); }, "metrics"_a,
        "latency"_a = LatencyModel{});
}

} // namespace

PYBIND11_MODULE(_hexhand, m)
{
    m.doc() = "GPS-assisted 802.11 handoff prediction on hexagonal AP maps";
    m.attr("__version__") = std::string(kVersion);

    auto base = py::register_exception<Error>(m, "HexhandError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ScenarioError>(m, "ScenarioError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    add_geo(m);
    add_topology(m);
    add_predictor(m);
    add_mobility(m);
    add_simulator(m);
}
