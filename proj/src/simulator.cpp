#include "hexhand/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "hexhand/error.hpp"
#include "hexhand/io.hpp"

namespace hexhand {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Coarse step of the ground-truth exit search, ms; the crossing is then bisected.
constexpr double kExitSearchStep = 1.0;

struct Exit {
    double t;
    std::optional<std::size_t> next; // none when the MN leaves the map
};

std::optional<std::size_t> entered_cell(const ApMap& map, PlanarCoord p, std::size_t current)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (i == current || !contains(map.cell(i), p))
            continue;
        if (!best || map.aps()[i].bssid < map.aps()[*best].bssid)
            best = i;
    }
    return best;
}

// First time at or after `from` where the noiseless MN is outside `current`.
std::optional<Exit> find_exit(const Trajectory& traj, const ApMap& map, std::size_t current, double from)
{
    const HexCell cell = map.cell(current);
    if (!contains(cell, traj.position_at(from)))
        return Exit{from, entered_cell(map, traj.position_at(from), current)};

    double lo = from;
    while (lo < traj.duration()) {
        const double hi = std::min(lo + kExitSearchStep, traj.duration());
        if (!contains(cell, traj.position_at(hi))) {
            double a = lo;
            double b = hi;
            for (int k = 0; k < 60 && b - a > 1e-9; ++k) {
                const double m = (a + b) / 2;
                if (contains(cell, traj.position_at(m)))
                    a = m;
                else
                    b = m;
            }
            return Exit{b, entered_cell(map, traj.position_at(b), current)};
        }
        lo = hi;
    }
    return std::nullopt;
}

TraceRow make_row(double t, PlanarCoord true_pos, const PredictorState& s, const PredictorConfig& cfg)
{
    TraceRow row{t, true_pos, s.last_pos, kNaN, kNaN, kNaN, kNaN, s.pe_x, s.ne_x, s.pe_y, s.ne_y, kNaN, kNaN};
    if (s.intervals > 0) {
        row.s_avg = average_speed(s, cfg);
        row.d = cfg.t_delay * row.s_avg;
        const auto rates = coordinate_rates(s, cfg);
        row.lambda_x = rates.x;
        row.lambda_y = rates.y;
    }
    if (s.last_error) {
        row.err_x = s.last_error->x;
        row.err_y = s.last_error->y;
    }
    return row;
}

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

} // namespace

void validate(const LatencyModel& m)
{
    if (m.n_channels < 1)
        throw std::invalid_argument("n_channels must be >= 1");
    if (!(m.t_min > 0 && m.t_max > 0 && m.per_channel > 0 && m.auth > 0 && m.reassoc > 0))
        throw std::invalid_argument("latency figures must be > 0");
    if (!(m.t_min <= m.per_channel && m.per_channel <= m.t_max))
        throw std::invalid_argument("latency model requires t_min <= per_channel <= t_max");
}

ScanBounds scan_latency_bounds(const LatencyModel& m, int n)
{
    if (n < 1 || n > m.n_channels)
        throw std::out_of_range("channel count outside [1, n_channels]");
    return {n * m.t_min, n * m.t_max};
}

double handoff_latency(const LatencyModel& m, int n_scanned)
{
    if (n_scanned < 1)
        throw std::out_of_range("at least one channel must be scanned");
    return n_scanned * m.per_channel + m.auth + m.reassoc;
}

Metrics summarize(std::span<const HandoffEvent> events)
{
    Metrics m;
    m.n_handoffs = events.size();
    if (events.empty())
        return m;
    std::vector<double> sel;
    std::vector<double> full;
    for (const auto& e : events) {
        m.n_correct += e.correct;
        m.n_two_ap += e.candidates.size() == 2;
        m.n_fallback += e.fallback;
        sel.push_back(e.latency_selective);
        full.push_back(e.latency_full);
    }
    const double n = static_cast<double>(events.size());
    m.accuracy = m.n_correct / n;
    m.two_ap_fraction = m.n_two_ap / n;
    m.fallback_fraction = m.n_fallback / n;
    m.mean_latency_selective = std::accumulate(sel.begin(), sel.end(), 0.0) / n;
    m.mean_latency_full = std::accumulate(full.begin(), full.end(), 0.0) / n;
    m.median_latency_selective = median(std::move(sel));
    m.median_latency_full = median(std::move(full));
    m.reduction_ratio = m.mean_latency_full / m.mean_latency_selective;
    return m;
}

ScenarioResult run_scenario(const Trajectory& traj, const ApMap& map, const PredictorConfig& cfg,
                            const LatencyModel& latency, const GpsNoiseModel& noise, std::uint64_t seed,
                            const SimulationOptions& options)
{
    validate(cfg);
    validate(latency);
    validate(noise);

    ScenarioResult result;
    GpsNoiseState gps(seed);

    auto assoc_opt = map.index_of_cell(traj.position_at(0));
    if (!assoc_opt)
        throw ScenarioError("trajectory starts outside the AP map");
    std::size_t assoc = *assoc_opt;
    bool first_cell = true;

    PlanarCoord true_pos = traj.position_at(0);
    PredictorState state = start_predictor(gps_fix(true_pos, noise, gps), 0.0);
    bool armed = false;
    bool latched = false;
    bool handing = false;
    std::optional<Exit> pending;

    if (options.record_trace)
        result.trace.push_back(make_row(0.0, true_pos, state, cfg));

    const double full_latency = handoff_latency(latency, latency.n_channels);
    auto emit = [&](double t, std::vector<std::size_t> cands, const std::optional<Exit>& exit) {
        HandoffEvent ev;
        ev.t = t;
        ev.mn_pos = state.last_pos;
        ev.predicted = state.intervals > 0
                           ? predicted_range(state, cfg)
                           : PredictedRange{state.last_pos.x, state.last_pos.x, state.last_pos.y, state.last_pos.y};
        for (auto i : cands)
            ev.candidates.push_back(map.aps()[i].bssid);
        if (exit && exit->next)
            ev.actual_next = map.aps()[*exit->next].bssid;
        ev.fallback = cands.empty();
        ev.correct = ev.fallback ||
                     (!ev.actual_next.empty() &&
                      std::find(ev.candidates.begin(), ev.candidates.end(), ev.actual_next) != ev.candidates.end());
        ev.n_scanned = ev.fallback ? latency.n_channels
                                   : std::min(static_cast<int>(ev.candidates.size()), latency.n_channels);
        ev.latency_selective = handoff_latency(latency, ev.n_scanned);
        ev.latency_full = full_latency;
        result.events.push_back(std::move(ev));
    };
    auto restart = [&](std::size_t cell, double t) {
        assoc = cell;
        first_cell = false;
        state = start_predictor(state.last_pos, t);
        armed = latched = handing = false;
        pending.reset();
    };

    const auto n_steps = static_cast<std::size_t>(std::floor(traj.duration() / cfg.sample_period + 1e-9));
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.sample_period;
        true_pos = traj.position_at(t);
        state = ingest_sample(state, gps_fix(true_pos, noise, gps), cfg);

        bool stop = false;
        if (handing) {
            if (pending && t >= pending->t) {
                if (pending->next)
                    restart(*pending->next, t);
                else
                    stop = true;
            }
        } else if (!contains(map.cell(assoc), true_pos)) {
            // The MN left coverage before a predicted handoff started.
            if (first_cell && !initialized(state, cfg))
                throw ScenarioError("MN reached the cell boundary before initialisation completed");
            const auto exit = find_exit(traj, map, assoc, t);
            emit(t, {}, exit);
            if (exit && exit->next)
                restart(*exit->next, t);
            else
                stop = true;
        } else if (initialized(state, cfg)) {
            const HexCell cell = map.cell(assoc);
            if (!armed) {
                armed = signed_boundary_distance(cell, state.last_pos) > trigger_distance(state, cfg);
            } else if (!latched) {
                latched = should_trigger(state, cell, cfg);
            }
            if (latched) {
                // Deferred: start once the extrapolated position has left the cell.
                const auto range = predicted_range(state, cfg);
                if (!options.defer_handoff || !contains(cell, range.center())) {
                    auto cands = candidate_indices(range, map, assoc);
                    pending = find_exit(traj, map, assoc, t);
                    emit(t, std::move(cands), pending);
                    handing = true;
                }
            }
        }

        if (options.record_trace)
            result.trace.push_back(make_row(t, true_pos, state, cfg));
        if (stop)
            break;
    }

    result.metrics = summarize(result.events);
    return result;
}

ScenarioResult run_scenario(const Scenario& s)
{
    if (!s.map)
        throw std::invalid_argument("scenario has no AP map");
    return run_scenario(Trajectory(s.trajectory), *s.map, s.predictor, s.latency, s.noise, s.seed, s.options);
}

SweepResult run_sweep(std::span<const Scenario> scenarios, unsigned threads, bool keep_results)
{
    SweepResult out;
    const std::size_t n = scenarios.size();
    std::vector<std::optional<ScenarioResult>> results(n);
    out.errors.assign(n, {});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = run_scenario(scenarios[i]);
            } catch (const std::exception& e) {
                out.errors[i] = e.what();
            }
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i)
            pool.emplace_back(worker);
    }

    for (auto& r : results)
        if (r)
            out.events.insert(out.events.end(), r->events.begin(), r->events.end());
    out.metrics = summarize(out.events);
    if (keep_results)
        out.results = std::move(results);
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string trace_csv(std::span<const TraceRow> rows)
{
    std::string out = "t_ms,true_x,true_y,meas_x,meas_y,s_avg,d,lambda_x,lambda_y,pe_x,ne_x,pe_y,ne_y,err_x,err_y\n";
    for (const auto& r : rows) {
        const double cols[] = {r.t,        r.true_pos.x, r.true_pos.y, r.meas_pos.x, r.meas_pos.y,
                               r.s_avg,    r.d,          r.lambda_x,   r.lambda_y,   r.pe_x,
                               r.ne_x,     r.pe_y,       r.ne_y,       r.err_x,      r.err_y};
        bool first = true;
        for (double v : cols) {
            if (!first)
                out += ',';
            out += format_double(v);
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::string events_csv(std::span<const HandoffEvent> events)
{
    std::string out = "t_ms,x,y,cand_count,candidates,actual,correct,lat_sel_ms,lat_full_ms\n";
    for (const auto& e : events) {
        std::string cands;
        for (const auto& c : e.candidates) {
            if (!cands.empty())
                cands += ';';
            cands += c;
        }
        out += format_double(e.t) + ',' + format_double(e.mn_pos.x) + ',' + format_double(e.mn_pos.y) + ',' +
               std::to_string(e.candidates.size()) + ',' + cands + ',' + e.actual_next + ',' +
               (e.correct ? "1" : "0") + ',' + format_double(e.latency_selective) + ',' +
               format_double(e.latency_full) + '\n';
    }
    return out;
}

std::string summary_text(const Metrics& m, const LatencyModel& latency)
{
    const auto bounds = scan_latency_bounds(latency, latency.n_channels);
    std::string out;
    auto kv = [&](const char* k, const std::string& v) { out += std::string(k) + '=' + v + '\n'; };
    kv("n_handoffs", std::to_string(m.n_handoffs));
    kv("n_correct", std::to_string(m.n_correct));
    kv("n_two_ap", std::to_string(m.n_two_ap));
    kv("n_fallback", std::to_string(m.n_fallback));
    kv("accuracy", format_double(m.accuracy));
    kv("two_ap_fraction", format_double(m.two_ap_fraction));
    kv("fallback_fraction", format_double(m.fallback_fraction));
    kv("mean_latency_selective_ms", format_double(m.mean_latency_selective));
    kv("median_latency_selective_ms", format_double(m.median_latency_selective));
    kv("mean_latency_full_ms", format_double(m.mean_latency_full));
    kv("median_latency_full_ms", format_double(m.median_latency_full));
    kv("reduction_ratio", format_double(m.reduction_ratio));
    kv("full_scan_lo_ms", format_double(bounds.lo));
    kv("full_scan_hi_ms", format_double(bounds.hi));
    return out;
}

} // namespace hexhand
