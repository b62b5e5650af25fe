#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hexhand/geo.hpp"

namespace hexhand {

enum class TrajectoryKind { Straight, Piecewise, RandomWaypoint, Arc };

std::string_view to_string(TrajectoryKind k);
TrajectoryKind parse_trajectory_kind(std::string_view s);

/// A waypoint and the speed (m/s) of the leg that arrives at it.
struct Waypoint {
    PlanarCoord pos{};
    double speed = 0.0;

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Declarative description of a ground-truth path. Speeds are m/s, times ms,
/// angles radians counter-clockwise from east.
struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::Straight;
    PlanarCoord start{};
    double heading = 0.0;
    double speed = 19.0222;
    double duration = 10'000.0;

    std::vector<Waypoint> waypoints; // piecewise

    double turn_radius = 100.0; // arc
    bool turn_left = true;

    // random_waypoint: destinations uniform in [area_min, area_max], leg
    // speeds uniform in [v_min, v_max], optional pause at each destination.
    PlanarCoord area_min{-500.0, -500.0};
    PlanarCoord area_max{500.0, 500.0};
    double v_min = 5.0;
    double v_max = 30.0;
    double pause = 0.0;
    std::uint64_t seed = 1;

    friend bool operator==(const TrajectorySpec&, const TrajectorySpec&) = default;
};

/// Evaluates a TrajectorySpec exactly at any time in [0, duration].
class Trajectory {
public:
    /// Throws std::invalid_argument for negative speeds, a non-positive
    /// duration, an empty piecewise waypoint list or a non-positive turn radius.
    explicit Trajectory(TrajectorySpec spec);

    const TrajectorySpec& spec() const noexcept { return spec_; }
    double duration() const noexcept { return spec_.duration; }

    /// Throws std::out_of_range for t outside [0, duration].
    PlanarCoord position_at(double t) const;

    /// Direction of travel in [-pi, pi); at rest, the last direction travelled.
    double heading_at(double t) const;

private:
    struct Leg {
        double t0;
        double t1;
        PlanarCoord from;
        PlanarCoord to;
        double heading;
    };

    void check_time(double t) const;
    const Leg& leg_at(double t) const;
    void add_leg(double& t, PlanarCoord from, PlanarCoord to, double speed, double& heading);

    TrajectorySpec spec_;
    std::vector<Leg> legs_;
};

} // namespace hexhand
