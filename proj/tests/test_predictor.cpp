#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <set>
#include <string>

#include "hexhand/predictor.hpp"
#include "hexhand/topology.hpp"
#include "oracles.hpp"

using namespace hexhand;

namespace {

PredictorState fold(const std::vector<PlanarCoord>& fixes, const PredictorConfig& cfg)
{
    auto s = start_predictor(fixes.front());
    for (std::size_t k = 1; k < fixes.size(); ++k)
        s = ingest_sample(s, fixes[k], cfg);
    return s;
}

std::vector<PlanarCoord> line(PlanarCoord start, PlanarCoord step, std::size_t n)
{
    std::vector<PlanarCoord> out{start};
    for (std::size_t k = 1; k <= n; ++k)
        out.push_back({start.x + step.x * double(k), start.y + step.y * double(k)});
    return out;
}

// Dense grid over the rectangle; returns the bssids of every cell hit.
std::set<std::string> dense_hits(const PredictedRange& r, const ApMap& map, std::string_view exclude)
{
    std::set<std::string> out;
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            const PlanarCoord p{r.x_lo + (r.x_hi - r.x_lo) * i / 200.0, r.y_lo + (r.y_hi - r.y_lo) * j / 200.0};
            for (const auto& ap : map.aps())
                if (ap.bssid != exclude && oracle::point_in_polygon(oracle::hexagon(ap.center, map.edge(), true), p))
                    out.insert(ap.bssid);
        }
    return out;
}

} // namespace

TEST_SUITE("predictor")
{
    TEST_CASE("config validation")
    {
        CHECK_NOTHROW(validate(PredictorConfig{}));
        CHECK_THROWS_AS(validate(PredictorConfig{61, 5, 50}), std::invalid_argument);
        CHECK_THROWS_AS(validate(PredictorConfig{60, 0, 50}), std::invalid_argument);
        CHECK_THROWS_AS(validate(PredictorConfig{60, 5, 0}), std::invalid_argument);
    }

    TEST_CASE("stationary node")
    {
        const PredictorConfig cfg;
        const auto s = fold(line({3, 4}, {0, 0}, 40), cfg);
        CHECK(s.cum_distance == 0.0);
        CHECK(average_speed(s, cfg) == 0.0);
        CHECK(trigger_distance(s, cfg) == 0.0);
        CHECK(coordinate_rates(s, cfg).x == 0.0);
        CHECK(coordinate_rates(s, cfg).y == 0.0);
        const auto r = predicted_range(s, cfg);
        CHECK(r == PredictedRange{3, 3, 4, 4});
    }

    TEST_CASE("twelve steps at the sample-run speed")
    {
        const PredictorConfig cfg;
        const double step = 19.0222 * 0.005;
        const auto s = fold(line({0, 0}, {step, 0}, 12), cfg);
        CHECK(s.intervals == 12);
        CHECK(s.elapsed == 60.0);
        CHECK(s.cum_distance == doctest::Approx(12 * 19.0222 * 0.005).epsilon(1e-12));
        CHECK(s.cum_distance == doctest::Approx(1.1413).epsilon(1e-4));
        CHECK(average_speed(s, cfg) == doctest::Approx(0.0190222).epsilon(1e-12));
        CHECK(trigger_distance(s, cfg) == doctest::Approx(50 * 0.0190222).epsilon(1e-12));
        CHECK(trigger_distance(s, cfg) == doctest::Approx(0.9511).epsilon(1e-4));
        CHECK(coordinate_rates(s, cfg).x == doctest::Approx(0.0190222).epsilon(1e-12));
        CHECK(coordinate_rates(s, cfg).y == 0.0);
        CHECK_FALSE(initialized(s, cfg));
        CHECK(initialized(ingest_sample(s, {13 * step, 0}, cfg), cfg));

        PredictorConfig twice = cfg;
        twice.t_delay = 100;
        CHECK(trigger_distance(s, twice) == 2 * trigger_distance(s, cfg));
    }

    TEST_CASE("undefined before the first interval")
    {
        const PredictorConfig cfg;
        const auto s = start_predictor({1, 1});
        CHECK_THROWS_AS(average_speed(s, cfg), std::invalid_argument);
        CHECK_THROWS_AS(trigger_distance(s, cfg), std::invalid_argument);
        CHECK_THROWS_AS(coordinate_rates(s, cfg), std::invalid_argument);
        CHECK_THROWS_AS(predicted_range(s, cfg), std::invalid_argument);
    }

    TEST_CASE("timed samples must keep the cadence")
    {
        const PredictorConfig cfg;
        auto s = start_predictor({0, 0}, 100.0);
        s = ingest_timed_sample(s, 105.0, {0.1, 0}, cfg);
        CHECK(s.intervals == 1);
        CHECK_THROWS_AS(ingest_timed_sample(s, 111.0, {0.2, 0}, cfg), std::invalid_argument);
        CHECK_NOTHROW(ingest_timed_sample(s, 110.0, {0.2, 0}, cfg));
    }

    TEST_CASE("closed loop has zero rates but positive speed")
    {
        const PredictorConfig cfg;
        std::vector<PlanarCoord> fixes;
        for (int k = 0; k <= 40; ++k) {
            const double a = 2 * M_PI * k / 40;
            fixes.push_back({10 * std::cos(a), 10 * std::sin(a)});
        }
        const auto s = fold(fixes, cfg);
        CHECK(std::abs(coordinate_rates(s, cfg).x) < 1e-12);
        CHECK(std::abs(coordinate_rates(s, cfg).y) < 1e-12);
        CHECK(average_speed(s, cfg) > 0.0);
    }

    TEST_CASE("error bounds")
    {
        PredictorState s;
        s = update_error_bounds(s, {0, 0}, {0, 0});
        CHECK(s.pe_x == 0.0);
        CHECK(s.ne_x == 0.0);
        s = update_error_bounds(s, {0, 0}, {0.1, 0});
        s = update_error_bounds(s, {0, 0}, {-0.2, 0});
        CHECK(s.pe_x == doctest::Approx(0.1));
        CHECK(s.ne_x == doctest::Approx(-0.2));
        s = update_error_bounds(s, {0, 0}, {0.05, 0});
        CHECK(s.pe_x == doctest::Approx(0.1));
        CHECK(s.ne_x == doctest::Approx(-0.2));
        REQUIRE(s.last_error);
        CHECK(s.last_error->x == doctest::Approx(0.05));
    }

    TEST_CASE("incremental state equals list recomputation")
    {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<std::size_t> len(13, 400);
        for (bool scaled : {true, false}) {
            PredictorConfig cfg;
            cfg.scale_error_bounds = scaled;
            for (int trial = 0; trial < 200; ++trial) {
                const auto fixes = oracle::random_trace(rng, len(rng));
                const auto s = fold(fixes, cfg);
                const auto o = oracle::recompute(fixes, cfg);
                CHECK(std::abs(s.cum_distance - o.cum_distance) < 1e-9);
                CHECK(std::abs(average_speed(s, cfg) - o.s_avg) < 1e-12);
                CHECK(std::abs(coordinate_rates(s, cfg).x - o.lambda_x) < 1e-12);
                CHECK(std::abs(coordinate_rates(s, cfg).y - o.lambda_y) < 1e-12);
                CHECK(std::abs(s.pe_x - o.pe_x) < 1e-9);
                CHECK(std::abs(s.ne_x - o.ne_x) < 1e-9);
                CHECK(std::abs(s.pe_y - o.pe_y) < 1e-9);
                CHECK(std::abs(s.ne_y - o.ne_y) < 1e-9);
                const auto r = predicted_range(s, cfg);
                CHECK(std::abs(r.x_lo - o.range.x_lo) < 1e-9);
                CHECK(std::abs(r.x_hi - o.range.x_hi) < 1e-9);
                CHECK(std::abs(r.y_lo - o.range.y_lo) < 1e-9);
                CHECK(std::abs(r.y_hi - o.range.y_hi) < 1e-9);
                CHECK(s.cum_distance >= std::hypot(s.cum_dx, s.cum_dy) - 1e-12);
            }
        }
    }

    TEST_CASE("bounds are monotone and the range holds the extrapolation point")
    {
        std::mt19937_64 rng(12);
        const PredictorConfig cfg;
        const auto fixes = oracle::random_trace(rng, 300);
        auto s = start_predictor(fixes.front());
        for (std::size_t k = 1; k < fixes.size(); ++k) {
            const auto next = ingest_sample(s, fixes[k], cfg);
            CHECK(next.pe_x >= s.pe_x);
            CHECK(next.pe_y >= s.pe_y);
            CHECK(next.ne_x <= s.ne_x);
            CHECK(next.ne_y <= s.ne_y);
            CHECK(next.pe_x >= 0.0);
            CHECK(next.ne_x <= 0.0);
            CHECK(next.elapsed == doctest::Approx(double(k) * cfg.sample_period));
            s = next;
            const auto r = predicted_range(s, cfg);
            CHECK(r.x_lo <= r.x_hi);
            CHECK(r.y_lo <= r.y_hi);
            CHECK(r.contains(extrapolate(s, cfg, cfg.t_delay)));
        }
    }

    TEST_CASE("noiseless linear motion predicts a single exact point")
    {
        const PredictorConfig cfg;
        const PlanarCoord v{0.0134, -0.0071}; // m per ms
        const auto fixes = line({12, -7}, {v.x * 5, v.y * 5}, 100);
        const auto s = fold(fixes, cfg);
        CHECK(std::abs(s.pe_x) < 1e-9);
        CHECK(std::abs(s.ne_x) < 1e-9);
        CHECK(std::abs(s.pe_y) < 1e-9);
        CHECK(std::abs(s.ne_y) < 1e-9);
        const auto r = predicted_range(s, cfg);
        const PlanarCoord truth{12 + v.x * (500 + 50), -7 + v.y * (500 + 50)};
        CHECK(std::abs(r.x_lo - truth.x) < 1e-9);
        CHECK(std::abs(r.x_hi - truth.x) < 1e-9);
        CHECK(std::abs(r.y_lo - truth.y) < 1e-9);
        CHECK(std::abs(r.y_hi - truth.y) < 1e-9);
    }

    TEST_CASE("translation and rotation equivariance")
    {
        std::mt19937_64 rng(13);
        const PredictorConfig cfg;
        const auto fixes = oracle::random_trace(rng, 120);
        const auto base = fold(fixes, cfg);
        const auto r0 = predicted_range(base, cfg);

        std::vector<PlanarCoord> moved;
        for (auto p : fixes)
            moved.push_back({p.x + 250.5, p.y - 77.25});
        const auto r1 = predicted_range(fold(moved, cfg), cfg);
        CHECK(r1.x_lo == doctest::Approx(r0.x_lo + 250.5).epsilon(1e-12));
        CHECK(r1.x_hi == doctest::Approx(r0.x_hi + 250.5).epsilon(1e-12));
        CHECK(r1.y_lo == doctest::Approx(r0.y_lo - 77.25).epsilon(1e-12));
        CHECK(r1.y_hi == doctest::Approx(r0.y_hi - 77.25).epsilon(1e-12));

        const double a = 0.7;
        const auto rot = [&](PlanarCoord p) {
            return PlanarCoord{p.x * std::cos(a) - p.y * std::sin(a), p.x * std::sin(a) + p.y * std::cos(a)};
        };
        std::vector<PlanarCoord> turned;
        for (auto p : fixes)
            turned.push_back(rot(p));
        const auto s2 = fold(turned, cfg);
        const auto l0 = coordinate_rates(base, cfg);
        const auto l2 = coordinate_rates(s2, cfg);
        const auto want = rot({l0.x, l0.y});
        CHECK(std::abs(l2.x - want.x) < 1e-12);
        CHECK(std::abs(l2.y - want.y) < 1e-12);
        const auto e0 = rot(extrapolate(base, cfg, cfg.t_delay));
        const auto e2 = extrapolate(s2, cfg, cfg.t_delay);
        CHECK(distance(e0, e2) < 1e-9);
    }

    TEST_CASE("sample-run range shape")
    {
        // Reference sample-run range; it must hold the recorded position.
        const PredictedRange r{199.9070, 199.9185, 77.4786, 77.4862};
        CHECK(r.contains({199.9117, 77.4825}));
        CHECK(r.x_hi - r.x_lo < 1.0);
        CHECK(r.y_hi - r.y_lo < 1.0);
    }

    TEST_CASE("candidates")
    {
        const auto map = generate_hex_map(2, 231);
        const auto& east = map.aps()[1];

        // Inside one neighbour.
        const PredictedRange inside{east.center.x - 0.5, east.center.x + 0.5, east.center.y - 0.5, east.center.y + 0.5};
        const auto one = candidate_aps(inside, map, map.aps()[0].bssid);
        REQUIRE(one.size() == 1);
        CHECK(one[0].bssid == east.bssid);

        // Point range at the current AP's centre.
        const auto& c0 = map.aps()[0].center;
        CHECK(candidate_aps({c0.x, c0.x, c0.y, c0.y}, map, map.aps()[0].bssid).empty());
        CHECK(candidate_aps({5000, 5001, 0, 1}, map).empty());
    }

    TEST_CASE("range straddling a shared edge between two neighbours")
    {
        const auto map = generate_hex_map(2, 231);
        const auto& a = map.aps()[1];
        const auto& b = map.aps()[2];
        const PlanarCoord mid{(a.center.x + b.center.x) / 2, (a.center.y + b.center.y) / 2};
        for (double w : {0.05, 0.5, 2.0}) {
            const PredictedRange r{mid.x - w, mid.x + w, mid.y - w, mid.y + w};
            const auto cands = candidate_aps(r, map, map.aps()[0].bssid);
            std::set<std::string> got;
            for (const auto& c : cands)
                got.insert(c.bssid);
            CHECK(got == dense_hits(r, map, map.aps()[0].bssid));
            CHECK(got == std::set<std::string>{a.bssid, b.bssid});
        }
    }

    TEST_CASE("candidates are ordered by distance to the range centre")
    {
        const auto map = generate_hex_map(2, 231);
        const auto& a = map.aps()[1];
        const auto& b = map.aps()[2];
        const PlanarCoord mid{(a.center.x + b.center.x) / 2, (a.center.y + b.center.y) / 2};
        const PlanarCoord toward_b{mid.x + (b.center.x - a.center.x) * 0.002, mid.y + (b.center.y - a.center.y) * 0.002};
        const auto cands = candidate_aps({toward_b.x - 1, toward_b.x + 1, toward_b.y - 1, toward_b.y + 1}, map);
        REQUIRE(cands.size() == 2);
        CHECK(cands[0].bssid == b.bssid);
    }

    TEST_CASE("should_trigger")
    {
        const PredictorConfig cfg;
        const HexCell cell{{0, 0}, 231, Orientation::Pointy};
        const double step = 19.0222 * 0.005;

        auto s = fold(line({-10 * step, 0}, {step, 0}, 10), cfg); // ends at centre
        CHECK(trigger_distance(s, cfg) == doctest::Approx(0.9511).epsilon(1e-4));
        CHECK_FALSE(should_trigger(s, cell, cfg));

        const double apo = apothem(231);
        s = fold(line({apo - 0.5 - 10 * step, 0}, {step, 0}, 10), cfg);
        CHECK(should_trigger(s, cell, cfg));

        s = fold(line({apo, 0}, {0, 0}, 10), cfg);
        CHECK(trigger_distance(s, cfg) == 0.0);
        CHECK(should_trigger(s, cell, cfg));

        s = fold(line({apo - 5, 0}, {0, 0}, 10), cfg);
        CHECK_FALSE(should_trigger(s, cell, cfg));
    }
}
