#include <doctest.h>

#include "ballwalk/statistics.hpp"
#include "ballwalk/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace ballwalk;

namespace {

// Midpoint quadrature of E|w|^2 = int_0^1 r^2 * N r^(N-1) dr.
double ball_second_moment_quadrature(int n) {
    const int m = 200000;
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
        double r = (k + 0.5) / m;
        s += r * r * n * std::pow(r, n - 1) / m;
    }
    return s;
}

} // namespace

TEST_CASE("philox4x32-10 known-answer vectors") {
    auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("streams are deterministic and distinct") {
    RngStream a = derive_stream(42, 7), b = derive_stream(42, 7);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    std::set<std::uint64_t> firsts;
    for (std::uint64_t k = 0; k < 1000; ++k) firsts.insert(derive_stream(42, k).next_u64());
    CHECK(firsts.size() == 1000);
    int differ = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) differ += derive_stream(42, k).next_u64() != derive_stream(43, k).next_u64();
    CHECK(differ == 1000);
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
}

TEST_CASE("uniform draws lie in the open unit interval") {
    RngStream s(1, 1);
    RunningStats st;
    for (int i = 0; i < 100000; ++i) {
        double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        st.add(u);
    }
    CHECK(std::abs(st.mean() - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 1e5));
}

TEST_CASE("sample_unit_ball: determinism and second moments") {
    {
        RngStream a(9, 9), b(9, 9);
        CHECK(sample_unit_ball(a, 3) == sample_unit_ball(b, 3));
    }
    for (int n : {2, 3}) {
        const double expected = ball_second_moment_quadrature(n);
        CHECK(expected == doctest::Approx(static_cast<double>(n) / (n + 2)).epsilon(1e-8));
        RngStream s(123, static_cast<std::uint64_t>(n));
        RunningStats st;
        for (int i = 0; i < 1'000'000; ++i) {
            Point w = sample_unit_ball(s, n);
            double r2 = dot(w, w);
            REQUIRE(r2 < 1.0);
            st.add(r2);
        }
        CAPTURE(n);
        CHECK(std::abs(st.mean() - expected) < 4.0 * st.stderr_of_mean());
    }
}

TEST_CASE("sample_unit_ball: |w|^N is uniform (Kolmogorov-Smirnov)") {
    for (int n : {1, 2, 5, 16}) {
        RngStream s(77, static_cast<std::uint64_t>(n));
        const int m = 100000;
        std::vector<double> v(m);
        for (auto& x : v) x = std::pow(norm(sample_unit_ball(s, n)), n);
        std::sort(v.begin(), v.end());
        double ks = 0.0;
        for (int i = 0; i < m; ++i) ks = std::max({ks, std::abs(v[i] - double(i) / m), std::abs(v[i] - double(i + 1) / m)});
        // 0.999 quantile of sqrt(m) * D_m is 1.949.
        CAPTURE(n);
        CHECK(std::sqrt(double(m)) * ks < 1.949);
    }
}

TEST_CASE("sample_unit_sphere: normalisation and moments") {
    const int m = 1'000'000;
    RngStream s(321, 0);
    const int n = 3;
    std::vector<RunningStats> coord(n);
    RunningStats w1sq;
    for (int i = 0; i < m; ++i) {
        Point w = sample_unit_sphere(s, n);
        REQUIRE(std::abs(norm(w) - 1.0) < 1e-12);
        for (int k = 0; k < n; ++k) coord[k].add(w[k]);
        w1sq.add(w[0] * w[0]);
    }
    // Coordinate variance on the sphere is 1/N.
    for (int k = 0; k < n; ++k) CHECK(std::abs(coord[k].mean()) < 4.0 * std::sqrt(1.0 / n) / 1e3);
    CHECK(std::abs(w1sq.mean() - 1.0 / 3.0) < 4.0 * w1sq.stderr_of_mean());
}

TEST_CASE("running stats: merge order is fixed, constants are exact") {
    RunningStats a, b, all;
    for (int i = 0; i < 1000; ++i) {
        double x = std::sin(i * 0.37);
        (i < 400 ? a : b).add(x);
        all.add(x);
    }
    a.merge(b);
    CHECK(a.count() == all.count());
    CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
    CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));

    RunningStats c, d;
    for (int i = 0; i < 777; ++i) c.add(0.1);
    for (int i = 0; i < 5; ++i) d.add(0.1);
    c.merge(d);
    CHECK(c.mean() == 0.1);
    CHECK(c.variance() == 0.0);
}
