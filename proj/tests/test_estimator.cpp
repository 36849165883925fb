#include <doctest.h>

#include "ballwalk/error.hpp"
#include "ballwalk/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace ballwalk;

namespace {

const Domain kDisk = Domain::ball({0.0, 0.0}, 1.0);
const Domain kSquare = Domain::box({0.0, 0.0}, {1.0, 1.0});

WalkConfig config(double eps) {
    WalkConfig c;
    c.epsilon = eps;
    c.stop_tolerance = 1e-4;
    return c;
}

bool same(const Estimate& a, const Estimate& b) {
    return a.mean == b.mean && a.std_error == b.std_error && a.n == b.n && a.truncated_count == b.truncated_count;
}

} // namespace

TEST_CASE("tietze_extend") {
    std::vector<Point> one{{0.3, 0.2}};
    std::vector<double> v1{4.5};
    CHECK(tietze_extend(one, v1, {0.9, -2.0}) == doctest::Approx(4.5));

    std::vector<Point> two{{1.0, 0.0}, {-1.0, 0.0}};
    std::vector<double> v2{0.0, 10.0};
    // candidates: 0 + 0.1/0.1 - 1 = 0 and 10 + 1.9/0.1 - 1 = 28
    CHECK(tietze_extend(two, v2, {0.9, 0.0}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(tietze_extend(two, v2, {-1.0, 0.0}) == 10.0);

    // Approaching a sample along a line recovers its value.
    std::vector<Point> three{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
    std::vector<double> v3{2.0, -1.0, 5.0};
    double prev_gap = 1e9;
    for (double t : {1e-1, 1e-2, 1e-3, 1e-5}) {
        double gap = std::abs(tietze_extend(three, v3, {1.0 - t, t}) - 2.0);
        CHECK(gap <= prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-4);
}

TEST_CASE("boundary data evaluation and spec strings") {
    CHECK(BoundaryData::coordinate(2)({0.1, 0.7}) == 0.7);
    CHECK(BoundaryData::constant(3.0)({0.1, 0.7}) == 3.0);
    CHECK(BoundaryData::distance_to({0.0, 0.0})({0.6, 0.8}) == doctest::Approx(1.0));
    auto quad = parse_boundary_data("harmonic(quad(1,-1))");
    CHECK(quad({0.3, 0.4}) == doctest::Approx(-0.07));
    CHECK(parse_boundary_data("quad(1,-1)")({0.3, 0.4}) == doctest::Approx(-0.07));
    CHECK(parse_boundary_data("sum(coordinate(1),constant(1))")({0.25, 0.0}) == 1.25);
    CHECK(parse_boundary_data("scaled(2,coordinate(2))")({0.25, 0.5}) == 1.0);
    for (const char* s : {"coordinate(1)", "constant(0.5)", "distance(1,0)", "harmonic(quad(1,0;0,-1))"}) {
        CHECK(parse_boundary_data(s).to_spec() == s);
    }
    CHECK_THROWS_AS(parse_boundary_data("coordinate(0)"), ParseError);
    CHECK_THROWS_AS(parse_boundary_data("coordinate(1.5)"), ParseError);
    CHECK_THROWS_AS(parse_boundary_data("wave(1)"), ParseError);
    CHECK_THROWS_AS(BoundaryData::tabulated({}, {}), InvalidArgument);
}

TEST_CASE("tabulated data loads from CSV") {
    const char* path = "estimator_test_table.csv";
    {
        std::ofstream out(path);
        out << "x1,x2,value\n1,0,0\n-1,0,10\n";
    }
    auto f = parse_boundary_data(std::string("tabulated(") + path + ")");
    CHECK(f({0.9, 0.0}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f({-1.0, 0.0}) == 10.0);
    std::remove(path);
}

TEST_CASE("estimate_value: constants are exact") {
    auto e = estimate_value(kDisk, BoundaryData::constant(0.1), {0.3, 0.4}, config(0.1), 3000, 5);
    CHECK(e.mean == 0.1);
    CHECK(e.std_error == 0.0);
    CHECK(e.n == 3000);
    CHECK(e.ci95_lo == 0.1);
    CHECK(e.truncated_count == 0);
}

TEST_CASE("estimate_value: harmonic data on the disk") {
    // x1 and x1^2 - x2^2 are their own harmonic extensions.
    auto lin = estimate_value(kDisk, BoundaryData::coordinate(1), {0.3, 0.4}, config(0.1), 100'000, 11);
    CHECK(std::abs(lin.mean - 0.3) < 4.0 * lin.std_error + projection_bias_budget(1.0, 1e-4));
    CHECK(lin.ci95_hi - lin.ci95_lo == doctest::Approx(2.0 * 1.96 * lin.std_error));

    auto quad = estimate_value(kDisk, parse_boundary_data("quad(1,-1)"), {0.3, 0.4}, config(0.1), 100'000, 12);
    CHECK(std::abs(quad.mean + 0.07) < 4.0 * quad.std_error + projection_bias_budget(2.0, 1e-4));
}

TEST_CASE("estimate_value: errors") {
    CHECK_THROWS_AS(estimate_value(kDisk, BoundaryData::constant(1.0), {1.0, 0.0}, config(0.1), 100, 1), InvalidArgument);
    CHECK_THROWS_AS(estimate_value(kDisk, BoundaryData::constant(1.0), {0.0, 0.0}, config(0.1), 1, 1), InvalidArgument);
    WalkConfig capped = config(0.01);
    capped.max_steps = 2;
    CHECK_THROWS_AS(estimate_value(kDisk, BoundaryData::constant(1.0), {0.0, 0.0}, capped, 100, 1), SimulationError);
}

TEST_CASE("estimate_value is independent of the worker count") {
    auto f = BoundaryData::coordinate(1);
    auto a = estimate_value(kSquare, f, {0.3, 0.6}, config(0.2), 5000, 77, {1});
    auto b = estimate_value(kSquare, f, {0.3, 0.6}, config(0.2), 5000, 77, {4});
    auto c = estimate_value(kSquare, f, {0.3, 0.6}, config(0.2), 5000, 77, {16});
    CHECK(same(a, b));
    CHECK(same(a, c));
    auto d = estimate_value(kSquare, f, {0.3, 0.6}, config(0.2), 5000, 78, {1});
    CHECK(a.mean != d.mean);
}

TEST_CASE("estimate_field") {
    std::vector<Point> one{{0.3, 0.4}};
    auto single = estimate_field(kDisk, BoundaryData::coordinate(2), one, config(0.1), 3000, 9);
    auto direct = estimate_value(kDisk, BoundaryData::coordinate(2), {0.3, 0.4}, config(0.1), 3000, 9);
    CHECK(same(single.front().estimate, direct));

    std::vector<Point> grid{{0.0, 0.0}, {0.5, 0.5}, {2.0, 0.0}, {-0.3, 0.1}};
    auto constant = estimate_field(kDisk, BoundaryData::constant(2.5), grid, config(0.1), 500, 3);
    CHECK(constant[0].estimate.mean == 2.5);
    CHECK_FALSE(constant[2].interior);
    CHECK(constant[3].estimate.mean == 2.5);

    // Comparison principle with shared streams: F <= F + 1 samplewise.
    auto lower = estimate_field(kDisk, BoundaryData::coordinate(1), grid, config(0.1), 2000, 21);
    auto upper = estimate_field(kDisk, parse_boundary_data("sum(coordinate(1),constant(1))"), grid, config(0.1), 2000, 21);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!lower[k].interior) continue;
        CHECK(lower[k].estimate.mean <= upper[k].estimate.mean);
    }
    CHECK_THROWS_AS(estimate_field(kDisk, BoundaryData::constant(1.0), {}, config(0.1), 10, 1), InvalidArgument);
}

TEST_CASE("linearity in the data under a shared seed") {
    auto f = BoundaryData::coordinate(1);
    auto g = parse_boundary_data("quad(1,-1)");
    auto h = BoundaryData::combination({{2.0, f}, {-3.0, g}});
    const Point x0{0.2, -0.1};
    auto ef = estimate_value(kDisk, f, x0, config(0.2), 4000, 8);
    auto eg = estimate_value(kDisk, g, x0, config(0.2), 4000, 8);
    auto eh = estimate_value(kDisk, h, x0, config(0.2), 4000, 8);
    CHECK(eh.mean == doctest::Approx(2.0 * ef.mean - 3.0 * eg.mean).epsilon(1e-12));
}

TEST_CASE("mean lies between the extremes of F over the exit samples") {
    const Point x0{0.1, 0.1};
    auto f = BoundaryData::distance_to({1.0, 0.0});
    auto batch = simulate_walks(kSquare, std::span<const Point>(&x0, 1), config(0.1), 3000, 4,
                                [&](const WalkOutcome& o) { return f(o.exit_point); });
    const auto& st = batch.front().stats;
    CHECK(st.min() <= st.mean());
    CHECK(st.mean() <= st.max());
}

TEST_CASE("epsilon-independence on the unit square") {
    // x1 * x2 is harmonic; u^eps(0.5, 0.5) = 0.25 for every eps.
    auto f = parse_boundary_data("quad(0,0.5;0.5,0)");
    std::vector<Estimate> e;
    for (double eps : {0.2, 0.05, 0.02}) e.push_back(estimate_value(kSquare, f, {0.5, 0.5}, config(eps), 20'000, 31));
    const double bias = projection_bias_budget(std::sqrt(2.0), 1e-4);
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j)
            CHECK(std::abs(e[i].mean - e[j].mean) <
                  4.0 * std::hypot(e[i].std_error, e[j].std_error) + 2.0 * bias);
}
