#include "hexhand/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexhand {

double norm(PlanarCoord v) { return std::hypot(v.x, v.y); }

double distance(PlanarCoord a, PlanarCoord b) { return norm(a - b); }

void validate(const GeoCoord& c)
{
    constexpr double half_pi = std::numbers::pi / 2;
    if (!(c.lat >= -half_pi && c.lat <= half_pi))
        throw std::invalid_argument("latitude outside [-pi/2, pi/2]");
    if (!(c.lon >= -std::numbers::pi && c.lon < std::numbers::pi))
        throw std::invalid_argument("longitude outside [-pi, pi)");
}

double haversin(double delta)
{
    const double s = std::sin(delta / 2);
    return s * s;
}

double haversine_distance(const GeoCoord& a, const GeoCoord& b, double radius)
{
    if (!(radius > 0))
        throw std::invalid_argument("radius must be positive");
    double h = haversin(b.lat - a.lat) + std::cos(a.lat) * std::cos(b.lat) * haversin(b.lon - a.lon);
    h = std::clamp(h, 0.0, 1.0);
    return 2 * radius * std::asin(std::sqrt(h));
}

bool movement_detected(const GeoCoord& prev, const GeoCoord& cur)
{
    return haversine_distance(prev, cur) > kMovementThreshold;
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double wrap_angle(double a)
{
    constexpr double two_pi = 2 * std::numbers::pi;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0)
        a += two_pi;
    return a - std::numbers::pi;
}

PlanarCoord geo_to_planar(const GeoCoord& p, const GeoCoord& origin)
{
    if (haversine_distance(p, origin) > kMaxProjectionRange)
        throw std::out_of_range("point too far from projection origin");
    const double dlon = wrap_angle(p.lon - origin.lon);
    return {kEarthRadius * dlon * std::cos(origin.lat), kEarthRadius * (p.lat - origin.lat)};
}

GeoCoord planar_to_geo(const PlanarCoord& p, const GeoCoord& origin)
{
    if (norm(p) > kMaxProjectionRange)
        throw std::out_of_range("offset too far from projection origin");
    const double c = std::cos(origin.lat);
    if (c <= 0)
        throw std::out_of_range("projection undefined at the poles");
    return {origin.lat + p.y / kEarthRadius, wrap_angle(origin.lon + p.x / (kEarthRadius * c))};
}

void validate(const GpsNoiseModel& m)
{
    if (!(m.sigma >= 0))
        throw std::invalid_argument("gps sigma must be >= 0");
    if (!(m.sample_period > 0))
        throw std::invalid_argument("gps sample period must be > 0");
    if (!(m.correlation_time >= 0))
        throw std::invalid_argument("gps correlation time must be >= 0");
}

PlanarCoord gps_fix(const PlanarCoord& true_pos, const GpsNoiseModel& model, GpsNoiseState& state)
{
    if (model.sigma == 0)
        return true_pos;

    std::normal_distribution<double> unit(0.0, 1.0);
    if (!state.primed || model.correlation_time == 0) {
        state.error = {model.sigma * unit(state.rng), model.sigma * unit(state.rng)};
        state.primed = true;
    } else {
        const double phi = std::exp(-model.sample_period / model.correlation_time);
        const double innovation = model.sigma * std::sqrt(1 - phi * phi);
        state.error.x = phi * state.error.x + innovation * unit(state.rng);
        state.error.y = phi * state.error.y + innovation * unit(state.rng);
    }
    return true_pos + state.error;
}

} // namespace hexhand
