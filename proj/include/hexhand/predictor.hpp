#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "hexhand/geo.hpp"
#include "hexhand/topology.hpp"

namespace hexhand {

/// Timing of the coordinate-evaluation predictor, all in milliseconds.
struct PredictorConfig {
    double init_duration = 60.0;
    double sample_period = 5.0;
    double t_delay = 50.0; // handoff completion time for one AP

    /// Average speed over the last init_duration instead of the whole run.
    bool sliding_window = false;
    /// Stretch the one-step error bounds by t_delay / sample_period when
    /// projecting them to the handoff horizon.
    bool scale_error_bounds = true;

    friend bool operator==(const PredictorConfig&, const PredictorConfig&) = default;
};

/// Throws std::invalid_argument unless init_duration is a positive multiple
/// of sample_period and t_delay > 0.
void validate(const PredictorConfig& cfg);

/// Per-axis average coordinate change, meters per millisecond.
struct CoordinateRates {
    double x = 0.0;
    double y = 0.0;
};

/// Running estimator. Planar y plays the role of latitude, x of longitude.
struct PredictorState {
    std::size_t intervals = 0; // completed sample intervals
    PlanarCoord last_pos{};
    double start_time = 0.0; // ms, time of the first fix
    double elapsed = 0.0;    // ms since the first fix

    double cum_distance = 0.0; // summed step lengths
    double cum_dx = 0.0;
    double cum_dy = 0.0;

    // Running extremes of the one-step prediction error, post-initialisation.
    double pe_x = 0.0;
    double ne_x = 0.0;
    double pe_y = 0.0;
    double ne_y = 0.0;

    /// Error of the latest interval, absent during initialisation.
    std::optional<PlanarCoord> last_error;

    /// Step lengths inside the sliding window (sliding_window mode only).
    std::deque<double> recent_steps;
};

/// Axis-aligned rectangle of positions expected after t_delay.
struct PredictedRange {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;

    PlanarCoord center() const { return {(x_lo + x_hi) / 2, (y_lo + y_hi) / 2}; }
    bool contains(PlanarCoord p) const { return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi; }

    friend bool operator==(const PredictedRange&, const PredictedRange&) = default;
};

PredictorState start_predictor(PlanarCoord first_fix, double start_time = 0.0);

/// True once the initialisation phase is over and error tracking has begun.
bool initialized(const PredictorState& state, const PredictorConfig& cfg);

/// Folds in the fix taken one sample_period after the previous one.
PredictorState ingest_sample(const PredictorState& state, PlanarCoord pos, const PredictorConfig& cfg);

/// As ingest_sample, but rejects fixes not exactly one sample_period later.
PredictorState ingest_timed_sample(const PredictorState& state, double t, PlanarCoord pos,
                                   const PredictorConfig& cfg);

/// Path length over observation time, m/ms. Throws before the first interval.
double average_speed(const PredictorState& state, const PredictorConfig& cfg);

/// d = t_delay * s_avg.
double trigger_distance(const PredictorState& state, const PredictorConfig& cfg);

CoordinateRates coordinate_rates(const PredictorState& state, const PredictorConfig& cfg);

/// last_pos + rates * horizon.
PlanarCoord extrapolate(const PredictorState& state, const PredictorConfig& cfg, double horizon);

PredictorState update_error_bounds(const PredictorState& state, PlanarCoord predicted_next, PlanarCoord actual_next);

PredictedRange predicted_range(const PredictorState& state, const PredictorConfig& cfg);

/// Indices of the cells covering any of the range's corners or its centre,
/// excluding `current`, nearest to the range centre first.
std::vector<std::size_t> candidate_indices(const PredictedRange& range, const ApMap& map,
                                           std::optional<std::size_t> current);

std::vector<AccessPoint> candidate_aps(const PredictedRange& range, const ApMap& map,
                                       std::string_view current_bssid = {});

/// True when the last fix lies within trigger distance of the cell boundary
/// (or has already left the cell).
bool should_trigger(const PredictorState& state, const HexCell& cell, const PredictorConfig& cfg);

} // namespace hexhand
