#include "hexhand/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace hexhand {

std::string_view to_string(TrajectoryKind k)
{
    switch (k) {
    case TrajectoryKind::Straight: return "straight";
    case TrajectoryKind::Piecewise: return "piecewise";
    case TrajectoryKind::RandomWaypoint: return "random_waypoint";
    case TrajectoryKind::Arc: return "arc";
    }
    return "straight";
}

TrajectoryKind parse_trajectory_kind(std::string_view s)
{
    for (auto k : {TrajectoryKind::Straight, TrajectoryKind::Piecewise, TrajectoryKind::RandomWaypoint,
                   TrajectoryKind::Arc})
        if (to_string(k) == s)
            return k;
    throw std::invalid_argument("unknown trajectory kind '" + std::string(s) + "'");
}

Trajectory::Trajectory(TrajectorySpec spec) : spec_(std::move(spec))
{
    if (!(spec_.duration > 0) || !std::isfinite(spec_.duration))
        throw std::invalid_argument("trajectory duration must be > 0");
    if (!std::isfinite(spec_.start.x) || !std::isfinite(spec_.start.y) || !std::isfinite(spec_.heading))
        throw std::invalid_argument("trajectory start and heading must be finite");
    if (!(spec_.speed >= 0))
        throw std::invalid_argument("speed must be >= 0");

    double heading = spec_.heading;
    switch (spec_.kind) {
    case TrajectoryKind::Straight:
        break;
    case TrajectoryKind::Arc:
        if (!(spec_.turn_radius > 0))
            throw std::invalid_argument("turn radius must be > 0");
        break;
    case TrajectoryKind::Piecewise: {
        if (spec_.waypoints.empty())
            throw std::invalid_argument("piecewise trajectory needs at least one waypoint");
        double t = 0.0;
        PlanarCoord at = spec_.start;
        for (const auto& wp : spec_.waypoints) {
            if (!(wp.speed >= 0))
                throw std::invalid_argument("waypoint speed must be >= 0");
            add_leg(t, at, wp.pos, wp.speed, heading);
            at = wp.pos;
        }
        break;
    }
    case TrajectoryKind::RandomWaypoint: {
        if (!(spec_.v_min > 0) || !(spec_.v_max >= spec_.v_min))
            throw std::invalid_argument("random waypoint needs 0 < v_min <= v_max");
        if (!(spec_.area_max.x > spec_.area_min.x) || !(spec_.area_max.y > spec_.area_min.y))
            throw std::invalid_argument("random waypoint area is empty");
        if (!(spec_.pause >= 0))
            throw std::invalid_argument("pause must be >= 0");
        std::mt19937_64 rng(spec_.seed);
        std::uniform_real_distribution<double> ux(spec_.area_min.x, spec_.area_max.x);
        std::uniform_real_distribution<double> uy(spec_.area_min.y, spec_.area_max.y);
        std::uniform_real_distribution<double> uv(spec_.v_min, spec_.v_max);
        double t = 0.0;
        PlanarCoord at = spec_.start;
        while (t < spec_.duration) {
            const PlanarCoord target{ux(rng), uy(rng)};
            add_leg(t, at, target, uv(rng), heading);
            at = target;
            if (spec_.pause > 0) {
                legs_.push_back({t, t + spec_.pause, at, at, heading});
                t += spec_.pause;
            }
        }
        break;
    }
    }
}

void Trajectory::add_leg(double& t, PlanarCoord from, PlanarCoord to, double speed, double& heading)
{
    const double length = distance(from, to);
    if (length == 0)
        return;
    if (speed == 0)
        throw std::invalid_argument("zero speed on a leg of non-zero length");
    heading = wrap_angle(std::atan2(to.y - from.y, to.x - from.x));
    const double dt = length / speed * 1000.0;
    legs_.push_back({t, t + dt, from, to, heading});
    t += dt;
}

void Trajectory::check_time(double t) const
{
    if (!(t >= 0 && t <= spec_.duration))
        throw std::out_of_range("time outside trajectory duration");
}

const Trajectory::Leg& Trajectory::leg_at(double t) const
{
    auto it = std::upper_bound(legs_.begin(), legs_.end(), t, [](double v, const Leg& l) { return v < l.t0; });
    return it == legs_.begin() ? *it : *std::prev(it);
}

PlanarCoord Trajectory::position_at(double t) const
{
    check_time(t);
    const double s = spec_.speed * t / 1000.0;
    switch (spec_.kind) {
    case TrajectoryKind::Straight:
        return spec_.start + PlanarCoord{std::cos(spec_.heading), std::sin(spec_.heading)} * s;
    case TrajectoryKind::Arc: {
        const double sign = spec_.turn_left ? 1.0 : -1.0;
        const double r = spec_.turn_radius;
        const double h0 = spec_.heading;
        const double h = h0 + sign * s / r;
        const PlanarCoord centre = spec_.start + PlanarCoord{-std::sin(h0), std::cos(h0)} * (sign * r);
        return centre + PlanarCoord{std::sin(h), -std::cos(h)} * (sign * r);
    }
    case TrajectoryKind::Piecewise:
    case TrajectoryKind::RandomWaypoint: {
        if (legs_.empty())
            return spec_.start;
        const Leg& leg = leg_at(t);
        if (t >= leg.t1)
            return leg.to;
        const double f = (t - leg.t0) / (leg.t1 - leg.t0);
        return leg.from + (leg.to - leg.from) * f;
    }
    }
    return spec_.start;
}

double Trajectory::heading_at(double t) const
{
    check_time(t);
    switch (spec_.kind) {
    case TrajectoryKind::Straight:
        return wrap_angle(spec_.heading);
    case TrajectoryKind::Arc: {
        const double sign = spec_.turn_left ? 1.0 : -1.0;
        return wrap_angle(spec_.heading + sign * (spec_.speed * t / 1000.0) / spec_.turn_radius);
    }
    case TrajectoryKind::Piecewise:
    case TrajectoryKind::RandomWaypoint:
        if (legs_.empty())
            return wrap_angle(spec_.heading);
        return leg_at(t).heading;
    }
    return spec_.heading;
}

} // namespace hexhand
