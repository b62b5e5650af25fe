#include "hexhand/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "hexhand/error.hpp"
#include "hexhand/io.hpp"

namespace hexhand {

namespace {

constexpr double kLatticeTolerance = 1e-6;

// Angle of the first edge normal; the other normals follow every 60 degrees.
double normal_offset(Orientation o)
{
    return o == Orientation::Pointy ? 0.0 : std::numbers::pi / 6;
}

double max_normal_projection(const HexCell& cell, PlanarCoord p)
{
    const PlanarCoord d = p - cell.center;
    const double base = normal_offset(cell.orientation);
    double best = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double a = base + k * std::numbers::pi / 3;
        best = std::max(best, std::abs(d.x * std::cos(a) + d.y * std::sin(a)));
    }
    return best;
}

struct Axial {
    int q;
    int r;
};

// Counter-clockwise unit steps used to walk a ring starting from its east-most cell.
constexpr std::array<Axial, 6> kRingWalk{{{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}}};

void lattice_coords(PlanarCoord off, double edge, Orientation o, double& q, double& r)
{
    if (o == Orientation::Pointy) {
        r = off.y / (1.5 * edge);
        q = off.x / (std::numbers::sqrt3 * edge) - r / 2;
    } else {
        q = off.x / (1.5 * edge);
        r = off.y / (std::numbers::sqrt3 * edge) - q / 2;
    }
}

std::string make_bssid(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "02:00:00:00:%02zx:%02zx", (index >> 8) & 0xff, index & 0xff);
    return buf;
}

} // namespace

std::string_view to_string(Orientation o)
{
    return o == Orientation::Pointy ? "pointy" : "flat";
}

Orientation parse_orientation(std::string_view s)
{
    if (s == "pointy")
        return Orientation::Pointy;
    if (s == "flat")
        return Orientation::Flat;
    throw std::invalid_argument("orientation must be 'flat' or 'pointy'");
}

std::array<PlanarCoord, 6> vertices(const HexCell& cell)
{
    std::array<PlanarCoord, 6> out{};
    const double start = cell.orientation == Orientation::Pointy ? -std::numbers::pi / 6 : 0.0;
    for (int k = 0; k < 6; ++k) {
        const double a = start + k * std::numbers::pi / 3;
        out[k] = cell.center + PlanarCoord{std::cos(a), std::sin(a)} * cell.edge;
    }
    return out;
}

double signed_boundary_distance(const HexCell& cell, PlanarCoord p)
{
    return apothem(cell.edge) - max_normal_projection(cell, p);
}

bool contains(const HexCell& cell, PlanarCoord p)
{
    return signed_boundary_distance(cell, p) >= -kBoundaryTolerance;
}

double distance_to_boundary(const HexCell& cell, PlanarCoord p)
{
    const double s = signed_boundary_distance(cell, p);
    if (s < -kBoundaryTolerance)
        throw std::invalid_argument("point lies outside the cell");
    return std::max(s, 0.0);
}

double default_neighbor_threshold(double edge) { return 2 * edge * std::numbers::sqrt3; }

PlanarCoord lattice_offset(int q, int r, double edge, Orientation o)
{
    if (o == Orientation::Pointy)
        return {std::numbers::sqrt3 * edge * (q + r / 2.0), 1.5 * edge * r};
    return {1.5 * edge * q, std::numbers::sqrt3 * edge * (r + q / 2.0)};
}

ApMap::ApMap(std::vector<AccessPoint> aps, double edge, Orientation orientation,
             std::optional<double> neighbor_threshold)
    : aps_(std::move(aps))
    , edge_(edge)
    , orientation_(orientation)
    , neighbor_threshold_(neighbor_threshold.value_or(default_neighbor_threshold(edge)))
{
    if (!(edge_ > 0) || !std::isfinite(edge_))
        throw std::invalid_argument("cell edge must be positive");
    if (!(neighbor_threshold_ >= 0))
        throw std::invalid_argument("neighbor threshold must be >= 0");

    std::set<std::string_view> seen;
    for (const auto& ap : aps_) {
        if (ap.bssid.empty())
            throw std::invalid_argument("empty bssid");
        if (!seen.insert(ap.bssid).second)
            throw std::invalid_argument("duplicate bssid " + ap.bssid);
        if (ap.channel < 1 || ap.channel > 14)
            throw std::invalid_argument("channel out of range for " + ap.bssid);
        if (!std::isfinite(ap.center.x) || !std::isfinite(ap.center.y))
            throw std::invalid_argument("non-finite centre for " + ap.bssid);
    }

    if (aps_.empty())
        return;
    const PlanarCoord anchor = aps_.front().center;
    for (const auto& ap : aps_) {
        double q = 0, r = 0;
        lattice_coords(ap.center - anchor, edge_, orientation_, q, r);
        const PlanarCoord snapped = lattice_offset(static_cast<int>(std::lround(q)),
                                                   static_cast<int>(std::lround(r)), edge_, orientation_);
        if (distance(anchor + snapped, ap.center) > kLatticeTolerance)
            throw std::invalid_argument("AP " + ap.bssid + " is not on the hexagonal lattice");
    }
    const double min_spacing = edge_ * std::numbers::sqrt3 - kLatticeTolerance;
    for (std::size_t i = 0; i < aps_.size(); ++i)
        for (std::size_t j = i + 1; j < aps_.size(); ++j)
            if (distance(aps_[i].center, aps_[j].center) < min_spacing)
                throw std::invalid_argument("APs " + aps_[i].bssid + " and " + aps_[j].bssid + " overlap");
}

HexCell ApMap::cell(std::size_t index) const { return cell(aps_.at(index)); }

HexCell ApMap::cell(const AccessPoint& ap) const { return {ap.center, edge_, orientation_}; }

std::optional<std::size_t> ApMap::find(std::string_view bssid) const
{
    for (std::size_t i = 0; i < aps_.size(); ++i)
        if (aps_[i].bssid == bssid)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> ApMap::index_of_cell(PlanarCoord p) const
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < aps_.size(); ++i) {
        if (!contains(cell(i), p))
            continue;
        if (!best || aps_[i].bssid < aps_[*best].bssid)
            best = i;
    }
    return best;
}

ApMap generate_hex_map(int rings, double edge, Orientation orientation, std::optional<double> neighbor_threshold)
{
    if (rings < 0)
        throw std::invalid_argument("ring count must be >= 0");
    constexpr std::array<int, 3> channels{1, 6, 11};

    std::vector<Axial> cells{{0, 0}};
    for (int k = 1; k <= rings; ++k) {
        Axial h{k, 0};
        for (const auto& step : kRingWalk)
            for (int s = 0; s < k; ++s) {
                cells.push_back(h);
                h.q += step.q;
                h.r += step.r;
            }
    }

    std::vector<AccessPoint> aps;
    aps.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto [q, r] = cells[i];
        const int colour = (((q - r) % 3) + 3) % 3;
        aps.push_back({make_bssid(i), channels[colour], lattice_offset(q, r, edge, orientation), "hexnet",
                       "2001:db8:" + std::to_string(i) + "::/64"});
    }
    return ApMap(std::move(aps), edge, orientation, neighbor_threshold);
}

const AccessPoint* cell_of(const ApMap& map, PlanarCoord p)
{
    const auto idx = map.index_of_cell(p);
    return idx ? &map.aps()[*idx] : nullptr;
}

std::vector<AccessPoint> neighbors(const ApMap& map, PlanarCoord p)
{
    const auto own = map.index_of_cell(p);
    std::vector<std::pair<double, std::size_t>> hits;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (own && *own == i)
            continue;
        const double dist = distance(map.aps()[i].center, p);
        if (dist < map.neighbor_threshold())
            hits.emplace_back(dist, i);
    }
    std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first < b.first;
        return map.aps()[a.second].bssid < map.aps()[b.second].bssid;
    });
    std::vector<AccessPoint> out;
    out.reserve(hits.size());
    for (const auto& [dist, i] : hits)
        out.push_back(map.aps()[i]);
    return out;
}

ApMap build_map_from_monitor_trace(std::span<const MonitorSample> samples, double edge, Orientation orientation,
                                   std::optional<double> neighbor_threshold)
{
    if (samples.empty())
        throw std::invalid_argument("monitor trace is empty");
    if (!(edge > 0))
        throw std::invalid_argument("cell edge must be positive");

    std::map<std::string, const MonitorSample*> loudest;
    for (const auto& s : samples) {
        auto [it, inserted] = loudest.try_emplace(s.bssid, &s);
        if (inserted)
            continue;
        if (it->second->channel != s.channel)
            throw std::invalid_argument("bssid " + s.bssid + " seen on conflicting channels");
        if (s.rssi > it->second->rssi)
            it->second = &s;
    }

    const MonitorSample* anchor = nullptr;
    for (const auto& [bssid, s] : loudest)
        if (!anchor || s->rssi > anchor->rssi)
            anchor = s;

    std::vector<AccessPoint> aps;
    std::set<std::pair<long, long>> used;
    for (const auto& [bssid, s] : loudest) {
        double q = 0, r = 0;
        lattice_coords(s->position - anchor->position, edge, orientation, q, r);
        const long qi = std::lround(q);
        const long ri = std::lround(r);
        if (!used.emplace(qi, ri).second)
            throw std::invalid_argument("bssid " + bssid + " maps onto an occupied cell");
        const PlanarCoord centre =
            anchor->position + lattice_offset(static_cast<int>(qi), static_cast<int>(ri), edge, orientation);
        aps.push_back({bssid, s->channel, centre, "", ""});
    }
    return ApMap(std::move(aps), edge, orientation, neighbor_threshold);
}

ApMap parse_map(std::string_view text)
{
    std::optional<double> edge;
    std::optional<double> threshold;
    Orientation orientation = Orientation::Pointy;
    bool have_header = false;
    std::vector<AccessPoint> aps;

    std::size_t lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        const auto line = trim(raw);
        if (line.empty())
            continue;

        if (!have_header) {
            have_header = true;
            std::size_t pos = 0;
            while (pos < line.size()) {
                const auto end = std::min(line.find_first_of(" \t", pos), line.size());
                const auto token = line.substr(pos, end - pos);
                pos = line.find_first_not_of(" \t", end);
                if (pos == std::string_view::npos)
                    pos = line.size();
                const auto eq = token.find('=');
                if (eq == std::string_view::npos)
                    throw ConfigError(lineno, "expected key=value in map header, got '" + std::string(token) + "'");
                const auto key = token.substr(0, eq);
                const auto value = token.substr(eq + 1);
                double v = 0;
                if (key == "edge_m") {
                    if (!parse_double(value, v))
                        throw ConfigError(lineno, "malformed edge_m");
                    edge = v;
                } else if (key == "neighbor_threshold_m") {
                    if (!parse_double(value, v))
                        throw ConfigError(lineno, "malformed neighbor_threshold_m");
                    threshold = v;
                } else if (key == "orientation") {
                    try {
                        orientation = parse_orientation(value);
                    } catch (const std::invalid_argument& e) {
                        throw ConfigError(lineno, e.what());
                    }
                } else {
                    throw ConfigError(lineno, "unknown map header key '" + std::string(key) + "'");
                }
            }
            if (!edge)
                throw ConfigError(lineno, "map header lacks edge_m");
            continue;
        }

        const auto fields = split(line, ',');
        if (fields.size() != 6)
            throw ConfigError(lineno, "expected 6 comma-separated fields");
        AccessPoint ap;
        ap.bssid = std::string(trim(fields[0]));
        long long channel = 0;
        if (!parse_int(trim(fields[1]), channel))
            throw ConfigError(lineno, "malformed channel");
        ap.channel = static_cast<int>(channel);
        if (!parse_double(trim(fields[2]), ap.center.x) || !parse_double(trim(fields[3]), ap.center.y))
            throw ConfigError(lineno, "malformed coordinate");
        ap.ssid = std::string(trim(fields[4]));
        ap.prefix = std::string(trim(fields[5]));
        aps.push_back(std::move(ap));
    }
    if (!have_header)
        throw ConfigError(0, "map file has no header line");
    try {
        return ApMap(std::move(aps), *edge, orientation, threshold);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
}

std::string render_map(const ApMap& map)
{
    std::string out = "edge_m=" + format_double(map.edge()) + " orientation=" + std::string(to_string(map.orientation())) +
                      " neighbor_threshold_m=" + format_double(map.neighbor_threshold()) + "\n";
    out += "# bssid,channel,x_m,y_m,ssid,prefix\n";
    for (const auto& ap : map.aps()) {
        out += ap.bssid + "," + std::to_string(ap.channel) + "," + format_double(ap.center.x) + "," +
               format_double(ap.center.y) + "," + ap.ssid + "," + ap.prefix + "\n";
    }
    return out;
}

ApMap read_map_file(const std::string& path) { return parse_map(read_file(path)); }

void write_map_file(const std::string& path, const ApMap& map) { write_file_atomic(path, render_map(map)); }

} // namespace hexhand
