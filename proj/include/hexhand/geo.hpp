#pragma once

#include <cstdint>
#include <numbers>
#include <random>

namespace hexhand {

/// Mean Earth radius in meters.
inline constexpr double kEarthRadius = 6'371'000.0;

/// Distance above which a position change counts as movement (location update).
inline constexpr double kMovementThreshold = 1.0;

/// Largest separation accepted by the local tangent-plane projection.
inline constexpr double kMaxProjectionRange = 50'000.0;

/// Geodetic position, radians.
struct GeoCoord {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoCoord&, const GeoCoord&) = default;
};

/// Local planar position in meters: x east, y north of the origin.
struct PlanarCoord {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PlanarCoord&, const PlanarCoord&) = default;

    PlanarCoord operator+(PlanarCoord o) const { return {x + o.x, y + o.y}; }
    PlanarCoord operator-(PlanarCoord o) const { return {x - o.x, y - o.y}; }
    PlanarCoord operator*(double s) const { return {x * s, y * s}; }
};

double norm(PlanarCoord v);
double distance(PlanarCoord a, PlanarCoord b);

/// Throws std::invalid_argument when lat is outside [-pi/2, pi/2] or lon
/// outside [-pi, pi).
void validate(const GeoCoord& c);

/// sin^2(delta / 2).
double haversin(double delta);

/// Great-circle distance on a sphere of the given radius.
double haversine_distance(const GeoCoord& a, const GeoCoord& b, double radius = kEarthRadius);

/// True when the two fixes are more than one meter apart.
bool movement_detected(const GeoCoord& prev, const GeoCoord& cur);

/// Equirectangular projection around `origin`. Throws std::out_of_range for
/// points more than kMaxProjectionRange away.
PlanarCoord geo_to_planar(const GeoCoord& p, const GeoCoord& origin);
GeoCoord planar_to_geo(const PlanarCoord& p, const GeoCoord& origin);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

/// GPS position error. The per-axis error is a stationary first-order
/// Gauss-Markov process with standard deviation `sigma` and correlation time
/// `correlation_time`; a zero correlation time gives independent fixes.
struct GpsNoiseModel {
    double sigma = 0.3;                 // m, P(Y)-code accuracy; 3.0 for C/A
    double sample_period = 5.0;         // ms
    double correlation_time = 60'000.0; // ms

    friend bool operator==(const GpsNoiseModel&, const GpsNoiseModel&) = default;
};

void validate(const GpsNoiseModel& m);

/// Receiver-side noise state: the RNG stream plus the current error.
struct GpsNoiseState {
    explicit GpsNoiseState(std::uint64_t seed) : rng(seed) {}

    std::mt19937_64 rng;
    PlanarCoord error{};
    bool primed = false;
};

/// Next fix for `true_pos`. Successive calls are taken one sample_period apart.
PlanarCoord gps_fix(const PlanarCoord& true_pos, const GpsNoiseModel& model, GpsNoiseState& state);

} // namespace hexhand
