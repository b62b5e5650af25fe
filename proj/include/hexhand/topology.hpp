#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexhand/geo.hpp"

namespace hexhand {

/// Hexagon orientation. Pointy cells have a vertex at the top and a flat side
/// facing east, so the first ring-1 neighbour lies due east. Flat cells have
/// a flat side on top and their first neighbour at 30 degrees.
enum class Orientation { Pointy, Flat };

std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view s);

/// Points this close to an edge count as on it.
inline constexpr double kBoundaryTolerance = 1e-9;

inline double apothem(double edge) { return edge * std::numbers::sqrt3 / 2; }

/// Regular hexagon with circumradius `edge`.
struct HexCell {
    PlanarCoord center{};
    double edge = 0.0;
    Orientation orientation = Orientation::Pointy;
};

/// Counter-clockwise, starting at the vertex nearest to angle 0.
std::array<PlanarCoord, 6> vertices(const HexCell& cell);

bool contains(const HexCell& cell, PlanarCoord p);

/// apothem - (largest projection onto an edge normal); negative outside.
double signed_boundary_distance(const HexCell& cell, PlanarCoord p);

/// Minimum distance from an interior point to the six edges. Throws
/// std::invalid_argument for points outside the cell.
double distance_to_boundary(const HexCell& cell, PlanarCoord p);

struct AccessPoint {
    std::string bssid;
    int channel = 1;
    PlanarCoord center{};
    std::string ssid;
    std::string prefix;

    friend bool operator==(const AccessPoint&, const AccessPoint&) = default;
};

/// Immutable table of access points on a uniform hexagonal tiling.
class ApMap {
public:
    /// Validates the tiling; throws std::invalid_argument on duplicate
    /// bssids, channels outside 1..14 or centres off the hexagonal lattice.
    /// A missing threshold defaults to 2 * edge * sqrt(3) (rings 1 and 2).
    ApMap(std::vector<AccessPoint> aps, double edge, Orientation orientation,
          std::optional<double> neighbor_threshold = std::nullopt);

    const std::vector<AccessPoint>& aps() const noexcept { return aps_; }
    std::size_t size() const noexcept { return aps_.size(); }
    double edge() const noexcept { return edge_; }
    Orientation orientation() const noexcept { return orientation_; }
    double neighbor_threshold() const noexcept { return neighbor_threshold_; }

    HexCell cell(std::size_t index) const;
    HexCell cell(const AccessPoint& ap) const;
    std::optional<std::size_t> find(std::string_view bssid) const;

    /// Index of the cell containing p; ties on shared edges go to the
    /// lexicographically smallest bssid.
    std::optional<std::size_t> index_of_cell(PlanarCoord p) const;

    friend bool operator==(const ApMap&, const ApMap&) = default;

private:
    std::vector<AccessPoint> aps_;
    double edge_;
    Orientation orientation_;
    double neighbor_threshold_;
};

double default_neighbor_threshold(double edge);

/// Centre offset of axial cell (q, r) in a tiling of the given edge.
PlanarCoord lattice_offset(int q, int r, double edge, Orientation o);

/// Map of 1 + 3K(K+1) cells centred on the origin. AP 0 sits at the origin,
/// then ring by ring counter-clockwise starting from the east-most cell.
/// Channels 1/6/11 are assigned so adjacent cells never share a channel.
ApMap generate_hex_map(int rings, double edge, Orientation orientation = Orientation::Pointy,
                       std::optional<double> neighbor_threshold = std::nullopt);

const AccessPoint* cell_of(const ApMap& map, PlanarCoord p);

/// APs whose centre is closer than the map's threshold, excluding the cell
/// containing p, nearest first.
std::vector<AccessPoint> neighbors(const ApMap& map, PlanarCoord p);

struct MonitorSample {
    PlanarCoord position{};
    std::string bssid;
    int channel = 1;
    double rssi = 0.0; // dB
};

/// One AP per bssid, placed where the monitor heard it loudest and snapped
/// onto the hexagonal lattice anchored at the loudest AP overall.
ApMap build_map_from_monitor_trace(std::span<const MonitorSample> samples, double edge,
                                   Orientation orientation = Orientation::Pointy,
                                   std::optional<double> neighbor_threshold = std::nullopt);

/// Line-oriented AP map text (see README for the format).
ApMap parse_map(std::string_view text);
std::string render_map(const ApMap& map);
ApMap read_map_file(const std::string& path);
void write_map_file(const std::string& path, const ApMap& map);

} // namespace hexhand
