#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "groundbn/ingest/bathymetry.hpp"
#include "groundbn/ingest/csv.hpp"
#include "groundbn/ingest/flow.hpp"
#include "groundbn/ingest/ground_reaction.hpp"

using namespace groundbn;
using namespace groundbn::ingest;
using Catch::Approx;

namespace {

LevelSeries linear_series(double h0, double rate, double dt, std::size_t n, std::function<double(double)> v) {
    LevelSeries s{"T1", {}, std::move(v)};
    for (std::size_t i = 0; i < n; ++i) s.samples.push_back({dt * i, h0 + rate * dt * i});
    return s;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / ("groundbn_" + name);
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST_CASE("flow_rate_from_levels: prismatic tank", "[ingest]") {
    auto s = linear_series(1.0, 0.1, 2.0, 31, [](double h) { return 1000.0 * h; });
    auto q = flow_rate_from_levels(s, 60.0);
    CHECK(q.rate == Approx(100.0).epsilon(1e-13));
    CHECK(q.sd == Approx(0.0).margin(1e-9));
    CHECK(q.samples == 31);
}

TEST_CASE("flow_rate_from_levels: quadratic curve", "[ingest]") {
    // V = 500 h^2, h = 2 m at the centre sample, hdot = 0.05 m/s, dt = 4 s
    LevelSeries s{"T1", {{-4, 1.8}, {0, 2.0}, {4, 2.2}}, [](double h) { return 500.0 * h * h; }};
    auto q = flow_rate_from_levels(s, 60.0);
    CHECK(q.rate == Approx(100.0).epsilon(1e-13));
}

TEST_CASE("flow_rate_from_levels: exact for affine and quadratic curves", "[ingest][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = 100 * U(rng), b = 50 + 2000 * U(rng), c = 10 + 500 * U(rng);
        const double dt = 1 + 9 * U(rng), rate = 0.01 + 0.2 * U(rng), h0 = 0.5 + 3 * U(rng);
        const std::size_t n = 3 + static_cast<std::size_t>(20 * U(rng));
        auto s = linear_series(h0, rate, dt, n, [=](double h) { return a + b * h; });
        auto q = flow_rate_from_levels(s, 1e6);
        CHECK(q.rate == Approx(b * rate).epsilon(1e-11));

        auto s2 = linear_series(h0, rate, dt, n, [=](double h) { return a + b * h + c * h * h; });
        auto q2 = flow_rate_from_levels(s2, 1e6);
        // analytic dV/dt = (b + 2 c h) hdot, averaged over the samples
        double mean_h = 0.0;
        for (const auto& x : s2.samples) mean_h += x.level;
        mean_h /= static_cast<double>(n);
        CHECK(q2.rate == Approx((b + 2 * c * mean_h) * rate).epsilon(1e-11));
    }
}

TEST_CASE("flow_rate_from_levels: window and errors", "[ingest]") {
    auto v = [](double h) { return 1000.0 * h; };
    LevelSeries two{"T1", {{0, 1}, {2, 1.1}}, v};
    CHECK_THROWS_MATCHES(flow_rate_from_levels(two), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::InsufficientSamples; }));
    // only the earliest 40 s are used: 21 samples at 2 s
    auto s = linear_series(1.0, 0.1, 2.0, 61, v);
    CHECK(flow_rate_from_levels(s, 40.0).samples == 21);
    CHECK_THROWS_AS(flow_rate_from_levels(s, 3.0), Error);
    CHECK_THROWS_MATCHES(VolumeCurve({0, 1, 2}, {0, 10, 5}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NonMonotoneVolumeCurve; }));
    CHECK_THROWS_AS(VolumeCurve({0, 1, 1}, {0, 10, 20}), Error);
}

TEST_CASE("volume curve and level series from CSV", "[ingest]") {
    auto curve = temp_file("curve.csv", "level_m,volume_m3\n0,0\n10,10000\n20,30000\n");
    auto series = temp_file("levels.csv", "time_s,level_m\n0,4.0\n2,4.2\n4,4.4\n\n6,4.6\n");
    auto vc = read_volume_curve(curve.string());
    CHECK(vc(5) == Approx(5000));
    CHECK(vc(15) == Approx(20000));
    CHECK(vc(25) == Approx(40000));  // linear extension
    LevelSeries s{"T1", read_level_series(series.string()), vc};
    REQUIRE(s.samples.size() == 4);
    CHECK(flow_rate_from_levels(s, 60).rate == Approx(100.0).epsilon(1e-12));

    auto bad = temp_file("bad.csv", "time_s,level_m\n0,1\n2,x\n");
    try {
        read_level_series(bad.string());
        FAIL("expected MalformedInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedInput);
        CHECK(e.field() == bad.string() + ":3");
    }
}

TEST_CASE("sum_tank_flows", "[ingest]") {
    std::vector<FlowEstimate> r{{700, 5, 20, FlowQuality::good}, {650, 7, 20, FlowQuality::poor}};
    auto s = sum_tank_flows(r);
    CHECK(s.rate == 1350);
    CHECK(s.quality == FlowQuality::poor);
    CHECK(s.sd == Approx(std::sqrt(74.0)));
    CHECK(sum_tank_flows(std::span(r).first(1)).rate == 700);
    CHECK(sum_tank_flows(std::span(r).first(1)).quality == FlowQuality::good);
    auto none = sum_tank_flows({});
    CHECK(none.rate == 0);
    CHECK(none.no_measurements);
}

TEST_CASE("sum_tank_flows is permutation invariant and associative", "[ingest][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0, 2000);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<FlowEstimate> r(2 + trial % 6);
        for (auto& f : r) f.rate = U(rng);
        const double total = sum_tank_flows(r).rate;
        auto p = r;
        std::shuffle(p.begin(), p.end(), rng);
        CHECK(sum_tank_flows(p).rate == total);
        const std::size_t k = 1 + trial % (r.size() - 1);
        std::vector<FlowEstimate> nested{sum_tank_flows(std::span(r).first(k)),
                                         sum_tank_flows(std::span(r).subspan(k))};
        CHECK(sum_tank_flows(nested).rate == Approx(total).epsilon(1e-14));
    }
}

TEST_CASE("ground_reaction_displacement", "[ingest]") {
    CHECK(ground_reaction_displacement(329765, 320129) == 9636);
    CHECK(ground_reaction_displacement(293474, 275954) == 17520);
    CHECK(ground_reaction_displacement(250000, 250000) == 0);
    CHECK_THROWS_MATCHES(ground_reaction_displacement(1000, 1001), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NegativeReaction; }));
}

TEST_CASE("ground_reaction_displacement(a, b) + b == a", "[ingest][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = 1e4 + 5e5 * U(rng);
        const double b = a * (0.5 + 0.5 * U(rng));
        CHECK(ground_reaction_displacement(a, b) + b == a);
    }
}

TEST_CASE("bathymetry_lookup", "[ingest]") {
    BathymetryGrid g({1.0, 1.1, 1.2}, {103.0, 103.1, 103.2}, {{14, 14, 18}, {14, 14, 18}, {20, 22, 24}});
    CHECK(g.lookup(1.0, 103.0) == 14);
    CHECK(g.lookup(1.2, 103.2) == 24);
    CHECK(g.lookup(1.0, 103.05) == Approx(14));
    CHECK(g.lookup(1.0, 103.15) == Approx(16));
    CHECK(g.lookup(1.15, 103.1) == Approx(18));
    CHECK(g.cell_lat() == Approx(0.1));
    CHECK_THROWS_MATCHES(g.lookup(1.3, 103.0), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::OutOfBounds; }));
    CHECK_THROWS_AS(BathymetryGrid({1, 2}, {1, 2}, {{1, NAN}, {1, 1}}), Error);
}

TEST_CASE("bathymetry_lookup is continuous across cell boundaries", "[ingest][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<std::vector<double>> d(5, std::vector<double>(6));
    for (auto& row : d)
        for (auto& x : row) x = 5 + 30 * U(rng);
    BathymetryGrid g({0, 1, 2, 3, 4}, {0, 1, 2, 3, 4, 5}, d);
    for (int i = 1; i < 4; ++i)
        for (int trial = 0; trial < 20; ++trial) {
            const double lon = 5 * U(rng);
            const double below = g.lookup(i - 1e-10, lon), at = g.lookup(i, lon), above = g.lookup(i + 1e-10, lon);
            CHECK(std::abs(below - at) < 1e-8);
            CHECK(std::abs(above - at) < 1e-8);
            const double lat = 4 * U(rng);
            CHECK(std::abs(g.lookup(lat, i - 1e-10) - g.lookup(lat, i + 1e-10)) < 1e-8);
        }
}

TEST_CASE("bathymetry raster from CSV", "[ingest]") {
    // latitudes listed north to south, as charts usually are
    std::istringstream in("lat\\lon,103.0,103.1\n1.1,20,22\n1.0,14,18\n");
    auto g = BathymetryGrid::from_csv(read_csv(in));
    CHECK(g.lookup(1.0, 103.0) == 14);
    CHECK(g.lookup(1.1, 103.1) == 22);
    CHECK(g.lookup(1.05, 103.05) == Approx(18.5));
}
