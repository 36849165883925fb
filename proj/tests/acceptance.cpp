// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Run with --full-crosscheck to repeat the independent punctured-disk
// simulation at 10^6 walks (minutes on one core).

#include "cli.hpp"

#include "ballwalk/analysis.hpp"
#include "ballwalk/estimator.hpp"
#include "ballwalk/format.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ballwalk;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kZ = 4.0;                        // standard errors
constexpr double kOracleBias = 0.01;              // criterion 1 bias budget
constexpr double kRuntime1 = 10.0;                // seconds, criterion 1
constexpr double kSuiteRuntime = 300.0;           // seconds, whole suite
constexpr double kThetaTol = 1e-12;               // closed-form cone bound
constexpr double kRegularMin = 0.95;              // regular probe probability
constexpr double kIrregularGap = 0.9;             // |u^eps(x) - F(y0)| near the puncture
constexpr double kPunctureStop = 1e-100;          // stop tolerance for the puncture runs

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!! ") + what;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

WalkConfig walk(double eps, std::optional<double> stop = std::nullopt, WalkKind kind = WalkKind::Ball) {
    WalkConfig c;
    c.epsilon = eps;
    c.stop_tolerance = stop;
    c.kind = kind;
    return c;
}

// Oracles written out by hand, independent of the library's oracle module.
double saddle(const Point& x) { return x[0] * x[0] - x[1] * x[1]; }

// ---------------------------------------------------------------------------

Verdict criterion1() {
    Verdict v;
    Domain disk = Domain::ball({0.0, 0.0}, 1.0);
    Point x{0.3, 0.4};
    auto t0 = Clock::now();
    Estimate e = estimate_value(disk, parse_boundary_data("quad(1,-1)"), x, walk(0.1, 1e-4), 100'000, 101);
    double secs = seconds_since(t0);
    double exact = saddle(x);
    double err = std::abs(e.mean - exact);
    v.require(err <= kZ * e.std_error + kOracleBias,
              "u=" + fmt(e.mean) + " exact=" + fmt(exact) + " |err|=" + fmt(err) + " <= " +
                  fmt(kZ * e.std_error + kOracleBias));
    v.require(secs < kRuntime1, "runtime " + fmt(secs) + "s < " + fmt(kRuntime1) + "s");
    return v;
}

Verdict criterion2() {
    Verdict v;
    Domain square = Domain::box({0.0, 0.0}, {1.0, 1.0});
    BoundaryData f = parse_boundary_data("quad(1,-1)");
    Point x{0.3, 0.6};
    struct Run {
        double eps;
        std::uint64_t n;
    };
    const std::vector<Run> runs{{0.2, 60'000}, {0.05, 30'000}, {0.02, 15'000}};
    std::vector<Estimate> est;
    for (const auto& r : runs) est.push_back(estimate_value(square, f, x, walk(r.eps), r.n, 202));
    // Gradient of x1^2 - x2^2 on the closed square is at most 2*sqrt(2).
    const double stop = 1e-4 * square.diameter();
    const double bias = projection_bias_budget(2.0 * std::numbers::sqrt2, stop);
    for (std::size_t i = 0; i < est.size(); ++i) {
        v.require(true, "eps=" + fmt(runs[i].eps) + ": " + fmt(est[i].mean) + "+-" + fmt(est[i].std_error));
        for (std::size_t j = i + 1; j < est.size(); ++j) {
            double se = std::hypot(est[i].std_error, est[j].std_error);
            double gap = std::abs(est[i].mean - est[j].mean);
            v.require(gap <= kZ * se + 2.0 * bias, "pair " + fmt(runs[i].eps) + "/" + fmt(runs[j].eps) +
                                                       " gap " + fmt(gap) + " <= " + fmt(kZ * se + 2.0 * bias));
        }
    }
    return v;
}

Verdict criterion3() {
    Verdict v;
    Domain ball = Domain::ball({0.0, 0.0, 0.0}, 1.0);
    BoundaryData f = parse_boundary_data("linear(1,2,-1;0.5)");
    Point x{0.2, -0.3, 0.1};
    const double exact = 0.2 - 0.6 - 0.1 + 0.5;
    Estimate b = estimate_value(ball, f, x, walk(0.1, std::nullopt, WalkKind::Ball), 100'000, 303);
    Estimate s = estimate_value(ball, f, x, walk(0.1, std::nullopt, WalkKind::Sphere), 100'000, 304);
    double se = std::hypot(b.std_error, s.std_error);
    v.require(std::abs(b.mean - s.mean) <= kZ * se,
              "ball " + fmt(b.mean) + " vs sphere " + fmt(s.mean) + " within " + fmt(kZ * se));
    v.require(std::abs(b.mean - exact) <= kZ * b.std_error, "ball vs exact " + fmt(exact));
    v.require(std::abs(s.mean - exact) <= kZ * s.std_error, "sphere vs exact " + fmt(exact));
    return v;
}

Verdict criterion4() {
    Verdict v;
    Point x{0.1, 0.2};
    auto sq = [](const Point& y) { return y[0] * y[0] + y[1] * y[1]; };
    for (double eps : {0.2, 0.1}) {
        auto r = averaging_residual(sq, 4.0, x, eps, 1'000'000, 404);
        v.require(std::abs(r.residual) <= kZ * r.std_error,
                  "|x|^2 eps=" + fmt(eps) + " residual " + fmt(r.residual) + " +- " + fmt(r.std_error));
    }
    auto quartic = [](const Point& y) { return std::pow(y[0], 4); };
    const double lap = 12.0 * x[0] * x[0];
    double prev = INFINITY;
    for (double eps : {0.2, 0.1, 0.05}) {
        auto r = averaging_residual(quartic, lap, x, eps, 1'000'000, 405);
        double ratio = r.residual / (eps * eps);
        v.require(ratio < prev, "x1^4 eps=" + fmt(eps) + " residual/eps^2 " + fmt(ratio));
        prev = ratio;
    }
    return v;
}

Verdict criterion5() {
    Verdict v;
    const double eps = 0.03, r = 0.3;
    auto s = exit_measure_stats(Domain::ball({0.0, 0.0, 0.0}, 1.0), {0.0, 0.0, 0.0}, r, eps, 100'000, 505);
    v.require(s.overshoot_min >= 0.0 && s.overshoot_max < eps,
              "overshoot in [" + fmt(s.overshoot_min) + ", " + fmt(s.overshoot_max) + "] < eps");
    for (std::size_t i = 0; i < 3; ++i) {
        double z_mean = std::abs(s.mean_direction[i]) / s.mean_direction_stderr[i];
        double z_cov = std::abs(s.direction_covariance[i * 3 + i] - 1.0 / 3.0) / s.covariance_diag_stderr[i];
        v.require(z_mean <= kZ && z_cov <= kZ,
                  "axis " + std::to_string(i + 1) + " z(mean)=" + fmt(z_mean) + " z(cov)=" + fmt(z_cov));
    }
    return v;
}

Verdict criterion6() {
    Verdict v;
    v.require(std::abs(cone_bound_theta0(3, 1.0) - 8.0 / 9.0) <= kThetaTol, "theta0(3,1)=8/9");
    v.require(std::abs(cone_bound_theta0(2, 1.0) - std::log(3.0) / std::log(4.0)) <= kThetaTol,
              "theta0(2,1)=log3/log4");
    v.require(std::abs(cone_bound_theta0(1, 1.0) - 2.0 / 3.0) <= kThetaTol, "theta0(1,1)=2/3");

    Domain ball = Domain::ball({0.0, 0.0, 0.0}, 1.0);
    const Point y0{1.0, 0.0, 0.0};
    Cone cone = Cone::make(y0, {1.0, 0.0, 0.0}, std::numbers::pi / 4.0, 1.0);

    // Supporting exterior cone: no sampled cone point lies in the domain.
    std::mt19937_64 gen(606);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int inside = 0, sampled = 0;
    while (sampled < 100'000) {
        Point p = y0 + Point{u(gen) + 1.0, u(gen), u(gen)};
        if (!cone.contains(p) || p == y0) continue;
        ++sampled;
        inside += ball.contains(p) ? 1 : 0;
    }
    v.require(inside == 0, "cone outside domain (" + std::to_string(sampled) + " samples)");

    const double R = cone_parameters(cone);
    const double theta0 = cone_bound_theta0(3, R);
    const double delta = 0.2;
    const double delta_hat = cone_probe_radius(delta, R);
    v.require(delta_hat <= cone_max_rho(cone), "R=" + fmt(R) + " theta0=" + fmt(theta0) + " delta_hat=" +
                                                   fmt(delta_hat) + " fits the cone");
    const std::vector<Point> probes{
        y0 - 0.1 * delta_hat * Point::unit(3, 0),
        y0 - 0.5 * delta_hat * Point::unit(3, 0),
        y0 - 0.9 * delta_hat * Point::unit(3, 0),
        y0 + 0.7 * delta_hat * (1.0 / std::sqrt(2.0)) * Point{-1.0, 1.0, 0.0},
        y0 + 0.6 * delta_hat * (1.0 / std::sqrt(3.0)) * Point{-1.0, -1.0, 1.0},
    };
    double worst = 0.0;
    bool within = true;
    std::uint64_t seed = 610;
    for (double eps : {0.1, 0.02}) {
        for (const auto& x0 : probes) {
            if (!ball.contains(x0)) continue;
            auto p = estimate_escape_probability(ball, y0, delta, x0, walk(eps), 20'000, seed++);
            worst = std::max(worst, p.p);
            within = within && p.p <= theta0 + kZ * p.std_error;
        }
    }
    v.require(within, "max escape probability " + fmt(worst) + " vs theta0 " + fmt(theta0));
    return v;
}

// Independent planar ball walk in the punctured unit disk from distance d:
// fraction of walks that stop at the puncture.
double brute_force_capture(double d, double eps, double stop, std::uint64_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uint64_t captured = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        double x = d, y = 0.0;
        for (;;) {
            double rho = std::hypot(x, y);
            double dist = std::min(1.0 - rho, rho);
            if (dist < stop || dist < 1e-12 * std::max(std::abs(x), std::abs(y))) {
                if (rho <= 1.0 - rho) ++captured;
                break;
            }
            double a, b;
            do {
                a = u(gen);
                b = u(gen);
            } while (a * a + b * b >= 1.0);
            double step = std::min(eps, dist);
            double nx = x + step * a, ny = y + step * b;
            double nrho = std::hypot(nx, ny);
            if (!(nrho < 1.0) || nrho == 0.0) { // rounding left the disk; stop in place
                if (rho <= 1.0 - rho) ++captured;
                break;
            }
            x = nx;
            y = ny;
        }
    }
    return static_cast<double>(captured) / static_cast<double>(n);
}

Verdict criterion7(bool full_crosscheck) {
    Verdict v;
    Domain disk = Domain::ball({0.0, 0.0}, 1.0);
    auto reg = estimate_regularity(disk, {1.0, 0.0}, 0.3, 0.02, walk(0.01), 6, 2000, 701);
    v.require(reg.min_probability() >= kRegularMin, "regular point min probability " + fmt(reg.min_probability()));

    Domain punctured = Domain::punctured_ball({0.0, 0.0}, 1.0);
    const std::vector<double> distances{1e-2, 1e-3};
    auto rows = irregularity_witness(punctured, {0.0, 0.0}, {0.1, 0.05}, distances, walk(0.1, kPunctureStop),
                                     20'000, 702);
    for (const auto& row : rows) {
        double bias = puncture_capture_bound_2d(1.0, row.start_distance, kPunctureStop);
        double err = std::abs(row.estimate.mean - 1.0);
        double gap = std::abs(row.estimate.mean - row.boundary_value);
        v.require(err <= kZ * row.estimate.std_error + bias && gap >= kIrregularGap,
                  "eps=" + fmt(row.epsilon) + " d=" + fmt(row.start_distance) + " u=" + fmt(row.estimate.mean) +
                      " F(y0)=" + fmt(row.boundary_value) + " bias<=" + fmt(bias));
    }
    // Cross-check the library against the independent walk at d = 1e-3.
    const std::uint64_t n_bf = full_crosscheck ? 1'000'000 : 20'000;
    double cap = brute_force_capture(1e-3, 0.1, kPunctureStop, n_bf, 703);
    double lib = 1.0 - rows[1].estimate.mean;
    double se = std::hypot(std::sqrt(cap * (1.0 - cap) / static_cast<double>(n_bf)), rows[1].estimate.std_error);
    v.require(std::abs(cap - lib) <= kZ * se + 1e-12, "capture brute force " + fmt(cap) + " (n=" +
                                                          std::to_string(n_bf) + ") vs library " + fmt(lib));
    return v;
}

Verdict criterion8() {
    Verdict v;
    Domain disk = Domain::ball({0.0, 0.0}, 1.0);
    auto m = martingale_check(disk, {0.5, 0.0}, 0.3, 1'000'000, 801);
    v.require(m.max_deviation_in_stderr < kZ, "martingale statistic " + fmt(m.max_deviation_in_stderr));

    // F1 <= F2 everywhere; the same walks must give F1(exit) <= F2(exit) and
    // ordered estimates.
    BoundaryData f1 = parse_boundary_data("coordinate(1)");
    BoundaryData f2 = parse_boundary_data("sum(coordinate(1),scaled(0.5,distance(0.5,0)))");
    const Point x0{0.2, -0.1};
    const WalkConfig wc = walk(0.1);
    auto diff = simulate_walks(disk, std::span(&x0, 1), wc, 50'000, 802, [&](const WalkOutcome& w) {
        return f2(w.exit_point) - f1(w.exit_point);
    });
    v.require(diff[0].stats.min() >= 0.0, "samplewise min F2-F1 = " + fmt(diff[0].stats.min()));
    auto e1 = estimate_value(disk, f1, x0, wc, 50'000, 802);
    auto e2 = estimate_value(disk, f2, x0, wc, 50'000, 802);
    v.require(e1.mean <= e2.mean, "u1=" + fmt(e1.mean) + " <= u2=" + fmt(e2.mean));
    return v;
}

std::string run_cli(std::vector<std::string> args, int& code) {
    std::ostringstream out, err;
    code = cli::main_entry(args, out, err);
    return out.str() + err.str();
}

Verdict criterion9(Clock::time_point suite_start, bool timed) {
    Verdict v;
    auto dir = std::filesystem::temp_directory_path() / "ballwalk_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::vector<std::string>> commands{
        {"solve", "--domain", "box(0,0;1,1)", "--data", "quad(1,-1)", "--eps", "0.05", "--walks", "20000", "--seed",
         "901", "--x0", "0.3,0.6"},
        {"field", "--domain", "diff(ball(0,0;1),box(-0.2,-0.2;0.2,0.2))", "--data", "coordinate(1)", "--eps", "0.2",
         "--walks", "500", "--seed", "902", "--lo", "-0.9,-0.9", "--hi", "0.9,0.9", "--resolution", "9",
         "--format", "json"},
    };
    for (const auto& cmd : commands) {
        std::vector<std::string> reports;
        for (const char* t : {"1", "4", "16"}) {
            auto args = cmd;
            std::string out = (dir / ("report_" + cmd[0] + "_" + t + ".txt")).string();
            args.insert(args.end(), {"--threads", t, "--out", out});
            int code = 0;
            std::string msg = run_cli(args, code);
            v.require(code == 0, cmd[0] + " --threads " + t + " exit " + std::to_string(code) + msg);
            std::ifstream f(out, std::ios::binary);
            std::stringstream ss;
            ss << f.rdbuf();
            reports.push_back(ss.str());
        }
        bool same = !reports[0].empty() && reports[0] == reports[1] && reports[0] == reports[2];
        v.require(same, cmd[0] + " reports byte-identical for threads 1/4/16 (" +
                            std::to_string(reports[0].size()) + " bytes)");
    }
    double secs = seconds_since(suite_start);
    if (timed) v.require(secs < kSuiteRuntime, "suite runtime " + fmt(secs) + "s < " + fmt(kSuiteRuntime) + "s");
    else v.require(true, "suite runtime " + fmt(secs) + "s not budgeted in --full-crosscheck mode");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    bool full = argc > 1 && std::strcmp(argv[1], "--full-crosscheck") == 0;
    const auto start = Clock::now();
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"oracle agreement", criterion1},
        {"eps-independence", criterion2},
        {"ball vs sphere walk", criterion3},
        {"averaging principle", criterion4},
        {"exit measure", criterion5},
        {"cone bound", criterion6},
        {"walk-regularity and its failure", [full] { return criterion7(full); }},
        {"martingale and comparison", criterion8},
        {"engineering determinism", [start, full] { return criterion9(start, !full); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        failures += v.pass ? 0 : 1;
        std::printf("CRITERION %zu %s: %s [%s] (%.1fs)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%s: %d of %zu criteria failed (%.1fs)\n", failures ? "FAIL" : "PASS", failures, criteria.size(),
                seconds_since(start));
    return failures ? 1 : 0;
}
