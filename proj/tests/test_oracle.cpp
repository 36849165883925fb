#include <doctest.h>

#include "ballwalk/error.hpp"
#include "ballwalk/oracle.hpp"
#include "ballwalk/stochastic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

using namespace ballwalk;

namespace {

std::vector<double> circle_samples(std::size_t m, double (*f)(double)) {
    std::vector<double> v(m);
    for (std::size_t k = 0; k < m; ++k) v[k] = f(2.0 * std::numbers::pi * double(k) / double(m));
    return v;
}

// 2N+1 point central-difference Laplacian.
double fd_laplacian(const HarmonicOracle& o, const Point& x, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        Point e = h * Point::unit(x.dim(), i);
        s += o.eval(x + e) + o.eval(x - e) - 2.0 * o.eval(x);
    }
    return s / (h * h);
}

} // namespace

TEST_CASE("eval examples") {
    CHECK(HarmonicOracle::linear({1.0, 0.0}, 0.0).eval({0.3, 0.4}) == doctest::Approx(0.3));
    CHECK(HarmonicOracle::quadratic_diagonal({1.0, -1.0}).eval({0.3, 0.4}) == doctest::Approx(-0.07).epsilon(1e-14));
    CHECK(HarmonicOracle::fundamental({2.0, 0.0}).eval({1.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(HarmonicOracle::fundamental({2.0, 0.0}).eval({2.0, 0.0}), InvalidArgument);
}

TEST_CASE("profile function") {
    CHECK(profile_function(2, std::exp(1.0)) == doctest::Approx(-1.0));
    CHECK(profile_function(3, 2.0) == doctest::Approx(0.5));
    CHECK(profile_function(1, 2.0) == doctest::Approx(-2.0));
    CHECK(profile_function(4, 2.0) == doctest::Approx(0.25));
}

TEST_CASE("quadratic oracle must be symmetric and trace-free") {
    CHECK_THROWS_AS(HarmonicOracle::quadratic_diagonal({1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(HarmonicOracle::quadratic(2, {1.0, 0.3, 0.0, -1.0}), InvalidArgument);
    CHECK_NOTHROW(HarmonicOracle::quadratic(2, {0.0, 0.5, 0.5, 0.0}));
}

TEST_CASE("every harmonic oracle passes a finite-difference Laplacian check") {
    std::vector<HarmonicOracle> oracles = {
        HarmonicOracle::linear({1.0, -2.0}, 0.5),
        HarmonicOracle::quadratic_diagonal({1.0, -1.0}),
        HarmonicOracle::quadratic(3, {1.0, 0.2, 0.0, 0.2, -3.0, 0.7, 0.0, 0.7, 2.0}),
        HarmonicOracle::fundamental({2.0, 0.0}),
        HarmonicOracle::fundamental({0.0, 0.0, 2.5}),
        HarmonicOracle::poisson_disk(circle_samples(256, [](double t) { return std::exp(std::cos(t)) * std::sin(std::sin(t)); })),
    };
    RngStream s(13, 0);
    for (const auto& o : oracles) {
        CAPTURE(o.to_spec());
        for (int k = 0; k < 20; ++k) {
            Point x = 0.5 * sample_unit_ball(s, o.dim());
            CHECK(std::abs(fd_laplacian(o, x, 1e-3)) < 1e-4);
            CHECK(laplacian_of(o, x) == 0.0);
        }
    }
}

TEST_CASE("poisson_disk_eval") {
    auto ones = circle_samples(64, [](double) { return 1.0; });
    for (Point x : {Point{0.0, 0.0}, Point{0.5, -0.3}}) CHECK(poisson_disk_eval(ones, x) == doctest::Approx(1.0).epsilon(1e-12));
    // Trapezoid error on the kernel is geometric in |x|^M.
    Point near_edge{-0.9, 0.1};
    double rm = std::pow(norm(near_edge), 64);
    CHECK(std::abs(poisson_disk_eval(ones, near_edge) - 1.0) <= 3.0 * rm / (1.0 - rm));
    auto cos1 = circle_samples(64, [](double t) { return std::cos(t); });
    CHECK(poisson_disk_eval(cos1, {0.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));
    auto cos2 = circle_samples(128, [](double t) { return std::cos(2.0 * t); });
    for (double r : {0.1, 0.4, 0.7}) CHECK(poisson_disk_eval(cos2, {r, 0.0}) == doctest::Approx(r * r).epsilon(1e-10));
    CHECK_THROWS_AS(poisson_disk_eval(ones, {1.0 - 1e-7, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(poisson_disk_eval(std::vector<double>(63, 1.0), {0.0, 0.0}), InvalidArgument);
}

TEST_CASE("poisson quadrature with M and 2M nodes agrees for low-degree trigonometric data") {
    const std::size_t m = 64;
    auto trig = [](double t) { return 0.3 + std::cos(t) - 0.5 * std::sin(3.0 * t) + 0.25 * std::cos(16.0 * t); };
    auto a = circle_samples(m, trig), b = circle_samples(2 * m, trig);
    RngStream s(1, 2);
    for (int k = 0; k < 20; ++k) {
        Point x = 0.5 * sample_unit_ball(s, 2);
        CHECK(std::abs(poisson_disk_eval(a, x) - poisson_disk_eval(b, x)) < 1e-10);
    }
}

TEST_CASE("test functions for the averaging expansion") {
    CHECK(laplacian_of(TestFunction::SquaredNorm, Point{1.0, 2.0, 3.0}) == 6.0);
    CHECK(laplacian_of(TestFunction::FirstCoordinateQuartic, Point{0.5, 0.0}) == 3.0);
    CHECK(test_function_value(TestFunction::FirstCoordinateQuartic, Point{0.5, 0.0}) == 0.0625);
    CHECK(laplacian_of(HarmonicOracle::linear({1.0}, 0.0), Point{0.2}) == 0.0);
}

TEST_CASE("oracle spec strings") {
    CHECK(parse_oracle("linear(1,0;0)").eval({0.3, 0.4}) == doctest::Approx(0.3));
    CHECK(parse_oracle("quad(1,-1)").eval({0.3, 0.4}) == doctest::Approx(-0.07));
    CHECK(parse_oracle("quad(0,0.5;0.5,0)").eval({0.5, 0.5}) == doctest::Approx(0.25));
    CHECK(parse_oracle("fundamental(2,0)").eval({1.0, 0.0}) == 0.0);
    CHECK(parse_oracle(parse_oracle("quad(1,-1)").to_spec()).eval({0.2, 0.1}) == doctest::Approx(0.03));
    CHECK_THROWS_AS(parse_oracle("quad(1,1)"), InvalidArgument);
    CHECK_THROWS_AS(parse_oracle("cubic(1)"), ParseError);

    const char* path = "oracle_test_samples.csv";
    {
        std::ofstream out(path);
        out << "theta,value\n";
        for (int k = 0; k < 128; ++k) {
            double t = 2.0 * std::numbers::pi * k / 128.0;
            char line[64];
            std::snprintf(line, sizeof line, "%.17g,%.17g\n", t, std::cos(t));
            out << line;
        }
    }
    auto o = parse_oracle(std::string("poisson(") + path + ")");
    CHECK(o.eval({0.25, 0.1}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(o.to_spec() == std::string("poisson(") + path + ")");
    std::remove(path);
}

TEST_CASE("validate_for rejects a pole inside the domain") {
    Domain disk = Domain::ball({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(HarmonicOracle::fundamental({0.5, 0.0}).validate_for(disk), InvalidArgument);
    CHECK_THROWS_AS(HarmonicOracle::fundamental({1.0, 0.0}).validate_for(disk), InvalidArgument);
    CHECK_NOTHROW(HarmonicOracle::fundamental({2.0, 0.0}).validate_for(disk));
    CHECK_THROWS_AS(HarmonicOracle::linear({1.0, 0.0, 0.0}, 0.0).validate_for(disk), InvalidArgument);
}
