#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexhand/geo.hpp"
#include "hexhand/mobility.hpp"
#include "hexhand/predictor.hpp"
#include "hexhand/topology.hpp"

namespace hexhand {

/// Channel counts and per-phase handoff timing, milliseconds.
struct LatencyModel {
    int n_channels = 11;
    double t_min = 5.0;        // MinChannelTime
    double t_max = 30.0;       // MaxChannelTime
    double per_channel = 30.0; // dwell charged per scanned channel
    double auth = 2.0;
    double reassoc = 2.0;

    friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

void validate(const LatencyModel& m);

struct ScanBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Scanning delay bracket for n channels: [n * t_min, n * t_max].
ScanBounds scan_latency_bounds(const LatencyModel& m, int n);

/// n_scanned * per_channel + auth + reassoc.
double handoff_latency(const LatencyModel& m, int n_scanned);

struct HandoffEvent {
    double t = 0.0;
    PlanarCoord mn_pos{}; // measured
    PredictedRange predicted{};
    std::vector<std::string> candidates;
    std::string actual_next; // empty when the MN never entered another cell
    bool correct = false;
    bool fallback = false; // empty candidate list, full scan
    int n_scanned = 0;
    double latency_selective = 0.0;
    double latency_full = 0.0;
};

/// One row per GPS sample. Values that are undefined at that instant are NaN.
struct TraceRow {
    double t = 0.0;
    PlanarCoord true_pos{};
    PlanarCoord meas_pos{};
    double s_avg = 0.0; // m/ms
    double d = 0.0;
    double lambda_x = 0.0;
    double lambda_y = 0.0;
    double pe_x = 0.0;
    double ne_x = 0.0;
    double pe_y = 0.0;
    double ne_y = 0.0;
    double err_x = 0.0;
    double err_y = 0.0;
};

struct Metrics {
    std::size_t n_handoffs = 0;
    std::size_t n_correct = 0;
    std::size_t n_two_ap = 0;
    std::size_t n_fallback = 0;
    double accuracy = 0.0;
    double two_ap_fraction = 0.0;
    double fallback_fraction = 0.0;
    double mean_latency_selective = 0.0;
    double median_latency_selective = 0.0;
    double mean_latency_full = 0.0;
    double median_latency_full = 0.0;
    double reduction_ratio = 1.0; // mean_full / mean_selective
};

Metrics summarize(std::span<const HandoffEvent> events);

struct SimulationOptions {
    /// After the trigger fires, wait for the first sample whose predicted
    /// range centre (the extrapolated position) lies outside the current
    /// cell before starting the handoff. When off, the handoff starts on the
    /// trigger sample even with no candidates.
    bool defer_handoff = true;
    bool record_trace = true;

    friend bool operator==(const SimulationOptions&, const SimulationOptions&) = default;
};

struct Scenario {
    TrajectorySpec trajectory;
    std::shared_ptr<const ApMap> map;
    PredictorConfig predictor;
    LatencyModel latency;
    GpsNoiseModel noise;
    std::uint64_t seed = 1;
    SimulationOptions options;
};

struct ScenarioResult {
    std::vector<HandoffEvent> events;
    Metrics metrics;
    std::vector<TraceRow> trace;
};

/// Steps the MN at the GPS sample cadence, running the predictor against the
/// associated cell and grading every handoff against the noiseless path.
/// Throws ScenarioError when the trajectory starts outside the map or the MN
/// leaves its first cell before initialisation completes.
ScenarioResult run_scenario(const Trajectory& traj, const ApMap& map, const PredictorConfig& cfg,
                            const LatencyModel& latency, const GpsNoiseModel& noise, std::uint64_t seed,
                            const SimulationOptions& options = {});
ScenarioResult run_scenario(const Scenario& scenario);

struct SweepResult {
    Metrics metrics;
    std::vector<HandoffEvent> events;              // scenario order
    std::vector<std::optional<ScenarioResult>> results;
    std::vector<std::string> errors;               // empty string on success
};

/// Runs scenarios on up to `threads` workers (0 = hardware concurrency).
/// Results and aggregation do not depend on the thread count.
SweepResult run_sweep(std::span<const Scenario> scenarios, unsigned threads = 0, bool keep_results = false);

/// Independent per-scenario seed (splitmix64 of master and index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

std::string trace_csv(std::span<const TraceRow> rows);
std::string events_csv(std::span<const HandoffEvent> events);
std::string summary_text(const Metrics& m, const LatencyModel& latency);

} // namespace hexhand
