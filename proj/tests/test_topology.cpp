#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>
#include <set>

#include "hexhand/error.hpp"
#include "hexhand/topology.hpp"
#include "oracles.hpp"

using namespace hexhand;

namespace {

std::vector<std::string> bssids(const std::vector<AccessPoint>& aps)
{
    std::vector<std::string> out;
    for (const auto& a : aps)
        out.push_back(a.bssid);
    return out;
}

std::vector<std::string> brute_force_neighbors(const ApMap& map, PlanarCoord p)
{
    const auto* own = cell_of(map, p);
    std::vector<std::pair<double, std::string>> hits;
    for (const auto& ap : map.aps())
        if ((!own || ap.bssid != own->bssid) && std::hypot(ap.center.x - p.x, ap.center.y - p.y) < map.neighbor_threshold())
            hits.emplace_back(std::hypot(ap.center.x - p.x, ap.center.y - p.y), ap.bssid);
    std::sort(hits.begin(), hits.end());
    std::vector<std::string> out;
    for (auto& h : hits)
        out.push_back(h.second);
    return out;
}

} // namespace

TEST_SUITE("topology")
{
    TEST_CASE("contains basics")
    {
        const HexCell cell{{10, -5}, 231, Orientation::Pointy};
        CHECK(contains(cell, cell.center));
        CHECK_FALSE(contains(cell, cell.center + PlanarCoord{2 * 231, 0}));
        CHECK_FALSE(contains(cell, cell.center + PlanarCoord{0, 2 * 231}));
        for (const auto& v : vertices(cell)) {
            CHECK(distance(v, cell.center) == doctest::Approx(231.0));
            CHECK(contains(cell, v));
        }
    }

    TEST_CASE("contains agrees with ray casting")
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1.2, 1.2);
        for (auto o : {Orientation::Pointy, Orientation::Flat}) {
            const HexCell cell{{37.5, -12.0}, 231, o};
            const auto poly = oracle::hexagon(cell.center, cell.edge, o == Orientation::Pointy);
            int agree = 0;
            for (int i = 0; i < 10'000; ++i) {
                const PlanarCoord p{cell.center.x + u(rng) * cell.edge, cell.center.y + u(rng) * cell.edge};
                agree += contains(cell, p) == oracle::point_in_polygon(poly, p);
            }
            CHECK(agree == 10'000);
        }
    }

    TEST_CASE("distance to boundary")
    {
        const HexCell cell{{0, 0}, 231, Orientation::Pointy};
        const double apo = distance_to_boundary(cell, cell.center);
        CHECK(apo == doctest::Approx(231 * std::sqrt(3.0) / 2).epsilon(1e-12));
        CHECK(apo == doctest::Approx(200.0519).epsilon(1e-6));

        // Dense sampling of the perimeter.
        const auto poly = oracle::hexagon(cell.center, cell.edge, true);
        double dense = INFINITY;
        for (std::size_t i = 0; i < 6; ++i)
            for (int k = 0; k <= 10'000; ++k) {
                const double t = k / 10'000.0;
                const PlanarCoord q{poly[i].x + t * (poly[(i + 1) % 6].x - poly[i].x),
                                    poly[i].y + t * (poly[(i + 1) % 6].y - poly[i].y)};
                dense = std::min(dense, distance(q, cell.center));
            }
        CHECK(apo == doctest::Approx(dense).epsilon(1e-8));

        const auto v = vertices(cell);
        const PlanarCoord mid{(v[0].x + v[1].x) / 2, (v[0].y + v[1].y) / 2};
        CHECK(distance_to_boundary(cell, mid) == doctest::Approx(0.0).epsilon(1e-9));

        CHECK_THROWS_AS(distance_to_boundary(cell, {500, 0}), std::invalid_argument);
    }

    TEST_CASE("distance to boundary matches the segment oracle")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto o : {Orientation::Pointy, Orientation::Flat}) {
            const HexCell cell{{-80, 44}, 300, o};
            const auto poly = oracle::hexagon(cell.center, cell.edge, o == Orientation::Pointy);
            int checked = 0;
            while (checked < 5000) {
                const PlanarCoord p{cell.center.x + u(rng) * 300, cell.center.y + u(rng) * 300};
                if (!contains(cell, p))
                    continue;
                ++checked;
                const double d = distance_to_boundary(cell, p);
                CHECK(std::abs(d - oracle::boundary_distance(poly, p)) < 1e-9);
                CHECK(d <= apothem(300) + 1e-12);
            }
        }
    }

    TEST_CASE("generated map layout")
    {
        const auto map = generate_hex_map(2, 231);
        REQUIRE(map.size() == 19);
        CHECK(map.aps()[0].center == PlanarCoord{0, 0});
        // AP 1 due east, one centre spacing away.
        CHECK(map.aps()[1].center.x == doctest::Approx(231 * std::sqrt(3.0)));
        CHECK(map.aps()[1].center.y == doctest::Approx(0.0));
        CHECK(generate_hex_map(3, 100).size() == 37);
        CHECK(map.neighbor_threshold() == doctest::Approx(2 * 231 * std::sqrt(3.0)));

        // Adjacent cells never share a channel.
        for (std::size_t i = 0; i < map.size(); ++i)
            for (std::size_t j = i + 1; j < map.size(); ++j)
                if (distance(map.aps()[i].center, map.aps()[j].center) < 231 * std::sqrt(3.0) + 1e-6)
                    CHECK(map.aps()[i].channel != map.aps()[j].channel);
    }

    TEST_CASE("cell_of")
    {
        const auto map = generate_hex_map(2, 231);
        for (const auto& ap : map.aps())
            CHECK(cell_of(map, ap.center)->bssid == ap.bssid);
        CHECK(cell_of(map, {10'000, 0}) == nullptr);

        // Point on the edge shared by AP 1 and AP 2 (neither is AP 0).
        const auto& a = map.aps()[1];
        const auto& b = map.aps()[2];
        const PlanarCoord mid{(a.center.x + b.center.x) / 2, (a.center.y + b.center.y) / 2};
        CHECK(contains(map.cell(1), mid));
        CHECK(contains(map.cell(2), mid));
        CHECK(cell_of(map, mid)->bssid == std::min(a.bssid, b.bssid));
        CHECK(cell_of(map, mid)->bssid == cell_of(map, mid)->bssid);
    }

    TEST_CASE("every interior point has exactly one owner")
    {
        const auto map = generate_hex_map(3, 231);
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<std::size_t> pick(0, map.size() - 1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 20'000; ++i) {
            const auto& ap = map.aps()[pick(rng)];
            const PlanarCoord p{ap.center.x + u(rng) * 231, ap.center.y + u(rng) * 231};
            if (!contains(map.cell(ap), p))
                continue;
            int owners = 0;
            for (std::size_t k = 0; k < map.size(); ++k)
                owners += contains(map.cell(k), p);
            CHECK(owners >= 1);
            CHECK(owners <= 3);
            const auto* owner = cell_of(map, p);
            REQUIRE(owner != nullptr);
            CHECK(contains(map.cell(*owner), p));
        }
    }

    TEST_CASE("neighbors")
    {
        const double e = 231;
        CHECK(neighbors(generate_hex_map(2, e, Orientation::Pointy, 0.0), {0, 0}).empty());

        const auto ring1 = generate_hex_map(2, e, Orientation::Pointy, 1.1 * e * std::sqrt(3.0));
        const auto n1 = neighbors(ring1, {0, 0});
        CHECK(n1.size() == 6);
        CHECK(bssids(n1) == brute_force_neighbors(ring1, {0, 0}));

        const auto wide = generate_hex_map(2, e, Orientation::Pointy, 2.2 * e * std::sqrt(3.0) / 2 * 2);
        CHECK(bssids(neighbors(wide, {0, 0})) == brute_force_neighbors(wide, {0, 0}));
        CHECK(neighbors(wide, {0, 0}).size() == 18);

        const auto map = generate_hex_map(3, e);
        const PlanarCoord corner = vertices(map.cell(0))[1] + PlanarCoord{-0.3, -0.2};
        CHECK(bssids(neighbors(map, corner)) == brute_force_neighbors(map, corner));
        for (std::size_t i = 1; i < neighbors(map, corner).size(); ++i)
            CHECK(distance(neighbors(map, corner)[i - 1].center, corner) <=
                  distance(neighbors(map, corner)[i].center, corner));
    }

    TEST_CASE("neighbors ignore AP order")
    {
        const auto map = generate_hex_map(3, 231);
        auto aps = map.aps();
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-600, 600);
        for (int trial = 0; trial < 20; ++trial) {
            std::shuffle(aps.begin(), aps.end(), rng);
            const ApMap shuffled(aps, map.edge(), map.orientation(), map.neighbor_threshold());
            const PlanarCoord p{u(rng), u(rng)};
            CHECK(bssids(neighbors(shuffled, p)) == bssids(neighbors(map, p)));
            const auto* a = cell_of(shuffled, p);
            const auto* b = cell_of(map, p);
            CHECK((a ? a->bssid : "") == (b ? b->bssid : ""));
        }
    }

    TEST_CASE("map validation")
    {
        const PlanarCoord east{231 * std::sqrt(3.0), 0};
        CHECK_THROWS_AS(ApMap({{"a", 1, {0, 0}, "", ""}, {"a", 6, east, "", ""}}, 231, Orientation::Pointy),
                        std::invalid_argument);
        CHECK_THROWS_AS(ApMap({{"a", 15, {0, 0}, "", ""}}, 231, Orientation::Pointy), std::invalid_argument);
        CHECK_THROWS_AS(ApMap({{"a", 1, {0, 0}, "", ""}, {"b", 6, {100, 0}, "", ""}}, 231, Orientation::Pointy),
                        std::invalid_argument);
        CHECK_THROWS_AS(ApMap({}, 0.0, Orientation::Pointy), std::invalid_argument);
        CHECK_NOTHROW(ApMap({{"a", 1, {0, 0}, "", ""}, {"b", 6, east, "", ""}}, 231, Orientation::Pointy));
    }

    TEST_CASE("monitor trace: one sample per AP")
    {
        const auto truth = generate_hex_map(1, 231);
        std::vector<MonitorSample> samples;
        for (const auto& ap : truth.aps())
            samples.push_back({ap.center, ap.bssid, ap.channel, -40.0});
        const auto map = build_map_from_monitor_trace(samples, 231);
        REQUIRE(map.size() == truth.size());
        for (const auto& ap : truth.aps()) {
            const auto i = map.find(ap.bssid);
            REQUIRE(i);
            CHECK(distance(map.aps()[*i].center, ap.center) < 1e-9);
            CHECK(map.aps()[*i].channel == ap.channel);
        }
    }

    TEST_CASE("monitor trace: recover a 7-cell map from a raster drive")
    {
        const auto truth = generate_hex_map(1, 231);
        const double step = 5.0;
        std::vector<MonitorSample> samples;
        for (double y = -700; y <= 700; y += step)
            for (double x = -700; x <= 700; x += step)
                for (const auto& ap : truth.aps()) {
                    const double d = distance({x, y}, ap.center);
                    if (d < 1.5 * 231)
                        samples.push_back({{x, y}, ap.bssid, ap.channel, -(40 + 30 * std::log10(std::max(d, 1.0)))});
                }
        const auto map = build_map_from_monitor_trace(samples, 231);
        REQUIRE(map.size() == 7);
        for (const auto& ap : truth.aps()) {
            const auto i = map.find(ap.bssid);
            REQUIRE(i);
            CHECK(distance(map.aps()[*i].center, ap.center) <= 2 * step);
        }
    }

    TEST_CASE("monitor trace: conflicting channels")
    {
        std::vector<MonitorSample> samples{{{0, 0}, "aa", 1, -40}, {{5, 0}, "aa", 6, -45}};
        CHECK_THROWS_AS(build_map_from_monitor_trace(samples, 231), std::invalid_argument);
        CHECK_THROWS_AS(build_map_from_monitor_trace(std::vector<MonitorSample>{}, 231), std::invalid_argument);
    }

    TEST_CASE("map file round trip")
    {
        for (auto o : {Orientation::Pointy, Orientation::Flat}) {
            const auto map = generate_hex_map(3, 187.3, o, 512.25);
            CHECK(parse_map(render_map(map)) == map);
        }
        const auto parsed = parse_map("# comment\n\nedge_m=231 orientation=pointy neighbor_threshold_m=800\n"
                                      "ap0,1,0,0,net,2001:db8::/64  # centre\n");
        CHECK(parsed.size() == 1);
        CHECK(parsed.aps()[0].prefix == "2001:db8::/64");
        CHECK(parsed.neighbor_threshold() == 800);
    }

    TEST_CASE("map file errors")
    {
        CHECK_THROWS_AS(parse_map(""), ConfigError);
        CHECK_THROWS_AS(parse_map("edge_m=231 colour=red\n"), ConfigError);
        CHECK_THROWS_AS(parse_map("orientation=flat\n"), ConfigError);
        CHECK_THROWS_AS(parse_map("edge_m=231\nap0,1,0,0,net\n"), ConfigError);
        CHECK_THROWS_AS(parse_map("edge_m=231\nap0,x,0,0,net,p\n"), ConfigError);
        CHECK_THROWS_AS(parse_map("edge_m=231\nap0,1,0,0,a,p\nap0,6,400.1,0,a,p\n"), ConfigError);
        try {
            parse_map("edge_m=231\n\nap0,1,zero,0,a,p\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line() == 3);
        }
    }
}
