#include "hexhand/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hexhand {

namespace {

std::size_t init_intervals(const PredictorConfig& cfg)
{
    return static_cast<std::size_t>(std::llround(cfg.init_duration / cfg.sample_period));
}

void require_samples(const PredictorState& state)
{
    if (state.intervals == 0)
        throw std::invalid_argument("predictor has no completed sample interval yet");
}

} // namespace

void validate(const PredictorConfig& cfg)
{
    if (!(cfg.sample_period > 0))
        throw std::invalid_argument("sample_period must be > 0");
    if (!(cfg.init_duration > 0))
        throw std::invalid_argument("init_duration must be > 0");
    const double ratio = cfg.init_duration / cfg.sample_period;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw std::invalid_argument("init_duration must be a multiple of sample_period");
    if (!(cfg.t_delay > 0))
        throw std::invalid_argument("t_delay must be > 0");
}

PredictorState start_predictor(PlanarCoord first_fix, double start_time)
{
    PredictorState s;
    s.last_pos = first_fix;
    s.start_time = start_time;
    return s;
}

bool initialized(const PredictorState& state, const PredictorConfig& cfg)
{
    return state.intervals > init_intervals(cfg);
}

PredictorState ingest_sample(const PredictorState& state, PlanarCoord pos, const PredictorConfig& cfg)
{
    PredictorState next = state;
    next.last_error.reset();
    if (state.intervals + 1 > init_intervals(cfg))
        next = update_error_bounds(next, extrapolate(state, cfg, cfg.sample_period), pos);

    const PlanarCoord step = pos - state.last_pos;
    const double length = norm(step);
    next.intervals = state.intervals + 1;
    next.elapsed = static_cast<double>(next.intervals) * cfg.sample_period;
    next.cum_distance += length;
    next.cum_dx += step.x;
    next.cum_dy += step.y;
    next.last_pos = pos;

    if (cfg.sliding_window) {
        next.recent_steps.push_back(length);
        while (next.recent_steps.size() > init_intervals(cfg))
            next.recent_steps.pop_front();
    }
    return next;
}

PredictorState ingest_timed_sample(const PredictorState& state, double t, PlanarCoord pos,
                                   const PredictorConfig& cfg)
{
    const double expected = state.start_time + state.elapsed + cfg.sample_period;
    if (std::abs(t - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
        throw std::invalid_argument("fix is not one sample period after the previous one");
    return ingest_sample(state, pos, cfg);
}

double average_speed(const PredictorState& state, const PredictorConfig& cfg)
{
    require_samples(state);
    if (cfg.sliding_window && !state.recent_steps.empty()) {
        const double sum = std::accumulate(state.recent_steps.begin(), state.recent_steps.end(), 0.0);
        return sum / (static_cast<double>(state.recent_steps.size()) * cfg.sample_period);
    }
    return state.cum_distance / state.elapsed;
}

double trigger_distance(const PredictorState& state, const PredictorConfig& cfg)
{
    return cfg.t_delay * average_speed(state, cfg);
}

CoordinateRates coordinate_rates(const PredictorState& state, const PredictorConfig& cfg)
{
    require_samples(state);
    const double span = cfg.sample_period * static_cast<double>(state.intervals);
    return {state.cum_dx / span, state.cum_dy / span};
}

PlanarCoord extrapolate(const PredictorState& state, const PredictorConfig& cfg, double horizon)
{
    const auto rates = coordinate_rates(state, cfg);
    return {state.last_pos.x + rates.x * horizon, state.last_pos.y + rates.y * horizon};
}

PredictorState update_error_bounds(const PredictorState& state, PlanarCoord predicted_next, PlanarCoord actual_next)
{
    PredictorState next = state;
    const PlanarCoord e = actual_next - predicted_next;
    next.pe_x = std::max(next.pe_x, e.x);
    next.ne_x = std::min(next.ne_x, e.x);
    next.pe_y = std::max(next.pe_y, e.y);
    next.ne_y = std::min(next.ne_y, e.y);
    next.last_error = e;
    return next;
}

PredictedRange predicted_range(const PredictorState& state, const PredictorConfig& cfg)
{
    const PlanarCoord c = extrapolate(state, cfg, cfg.t_delay);
    const double scale = cfg.scale_error_bounds ? cfg.t_delay / cfg.sample_period : 1.0;
    return {c.x + state.ne_x * scale, c.x + state.pe_x * scale, c.y + state.ne_y * scale, c.y + state.pe_y * scale};
}

std::vector<std::size_t> candidate_indices(const PredictedRange& range, const ApMap& map,
                                           std::optional<std::size_t> current)
{
    const std::array<PlanarCoord, 5> probes{{{range.x_lo, range.y_lo},
                                             {range.x_hi, range.y_lo},
                                             {range.x_hi, range.y_hi},
                                             {range.x_lo, range.y_hi},
                                             range.center()}};
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (current && *current == i)
            continue;
        const HexCell cell = map.cell(i);
        if (std::any_of(probes.begin(), probes.end(), [&](PlanarCoord p) { return contains(cell, p); }))
            out.push_back(i);
    }
    const PlanarCoord c = range.center();
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
        const double da = distance(map.aps()[a].center, c);
        const double db = distance(map.aps()[b].center, c);
        if (da != db)
            return da < db;
        return map.aps()[a].bssid < map.aps()[b].bssid;
    });
    return out;
}

std::vector<AccessPoint> candidate_aps(const PredictedRange& range, const ApMap& map, std::string_view current_bssid)
{
    std::vector<AccessPoint> out;
    for (auto i : candidate_indices(range, map, map.find(current_bssid)))
        out.push_back(map.aps()[i]);
    return out;
}

bool should_trigger(const PredictorState& state, const HexCell& cell, const PredictorConfig& cfg)
{
    const double s = signed_boundary_distance(cell, state.last_pos);
    if (s < -kBoundaryTolerance)
        return true;
    return std::max(s, 0.0) <= trigger_distance(state, cfg);
}

} // namespace hexhand
