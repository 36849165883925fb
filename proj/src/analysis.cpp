#include "ballwalk/analysis.hpp"

#include "ballwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ballwalk {

namespace {

constexpr std::uint64_t kSamplesPerChunk = 4096;
constexpr int kProbeTrials = 10'000;
constexpr double kBoundaryTol = 1e-9;

std::uint64_t chunk_count(std::uint64_t n) { return (n + kSamplesPerChunk - 1) / kSamplesPerChunk; }

// Independent per-sample aggregation in fixed-size chunks: sample j of chunk c
// draws from derive_stream(seed, c). Partials are merged in chunk order.
template <class Acc, class Sample>
Acc chunked(std::uint64_t n, std::uint64_t seed, const Parallelism& par, Sample&& sample) {
    const std::uint64_t chunks = chunk_count(n);
    std::vector<Acc> partial(chunks);
    for_each_task(chunks, par, [&](std::size_t c) {
        RngStream stream = derive_stream(seed, c);
        const std::uint64_t begin = c * kSamplesPerChunk;
        const std::uint64_t end = std::min(n, begin + kSamplesPerChunk);
        for (std::uint64_t j = begin; j < end; ++j) sample(stream, partial[c]);
    });
    Acc total;
    for (const auto& p : partial) total.merge(p);
    return total;
}

struct CoordinateStats {
    std::vector<RunningStats> coords;
    void merge(const CoordinateStats& o) {
        if (coords.empty()) coords.resize(o.coords.size());
        for (std::size_t i = 0; i < o.coords.size(); ++i) coords[i].merge(o.coords[i]);
    }
};

struct DirectionStats {
    std::vector<RunningStats> first;  // u_i
    std::vector<RunningStats> second; // u_i^2
    std::vector<double> cross;        // sum u_i u_j
    RunningStats overshoot;
    void merge(const DirectionStats& o) {
        if (o.first.empty()) return;
        if (first.empty()) {
            first.resize(o.first.size());
            second.resize(o.second.size());
            cross.assign(o.cross.size(), 0.0);
        }
        for (std::size_t i = 0; i < o.first.size(); ++i) {
            first[i].merge(o.first[i]);
            second[i].merge(o.second[i]);
        }
        for (std::size_t k = 0; k < o.cross.size(); ++k) cross[k] += o.cross[k];
        overshoot.merge(o.overshoot);
    }
};

struct ScalarStats {
    RunningStats stats;
    void merge(const ScalarStats& o) { stats.merge(o.stats); }
};

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
}

} // namespace

Residual mean_value_residual(const Domain& domain, const BoundaryData& f, const Point& x, const WalkConfig& config,
                             std::uint64_t n_outer, std::uint64_t n_inner, std::uint64_t seed, const Parallelism& par) {
    if (n_outer < 2 || n_inner < 2) throw InvalidArgument("mean_value_residual needs n_outer, n_inner >= 2");
    const WalkConfig cfg = config.resolved(domain);
    const double rho = std::min(cfg.epsilon, domain.distance_to_boundary(x));

    Estimate centre = estimate_value(domain, f, x, cfg, n_inner, mix_seed(seed, 0), par);

    std::vector<Point> ys;
    ys.reserve(n_outer);
    RngStream outer = derive_stream(mix_seed(seed, 1), 0);
    for (std::uint64_t j = 0; j < n_outer; ++j) ys.push_back(x + rho * sample_unit_ball(outer, x.dim()));

    auto field = estimate_field(domain, f, ys, cfg, n_inner, mix_seed(seed, 2), par);
    RunningStats averages;
    for (const auto& e : field) {
        if (!e.interior) throw SimulationError("mean_value_residual: averaging point left the domain");
        averages.add(e.estimate.mean);
    }
    // The spread of the inner means carries both the outer sampling noise and
    // the inner Monte Carlo noise.
    Residual r;
    r.residual = centre.mean - averages.mean();
    r.std_error = std::sqrt(centre.std_error * centre.std_error + averages.variance() / static_cast<double>(n_outer));
    return r;
}

Residual averaging_residual(const std::function<double(const Point&)>& u, double laplacian_at_x, const Point& x,
                            double epsilon, std::uint64_t n_samples, std::uint64_t seed, const Parallelism& par) {
    if (!(epsilon > 0.0)) throw InvalidArgument("averaging_residual: epsilon must be positive");
    if (n_samples < 2) throw InvalidArgument("averaging_residual needs at least two samples");
    auto acc = chunked<ScalarStats>(n_samples, seed, par, [&](RngStream& s, ScalarStats& a) {
        a.stats.add(u(x + epsilon * sample_unit_ball(s, x.dim())));
    });
    const double n = static_cast<double>(x.dim());
    Residual r;
    r.residual = acc.stats.mean() - u(x) - epsilon * epsilon / (2.0 * (n + 2.0)) * laplacian_at_x;
    r.std_error = acc.stats.stderr_of_mean();
    return r;
}

ExitMeasureStats exit_measure_stats(const Domain& domain, const Point& x0, double r, double epsilon, std::uint64_t n,
                                    std::uint64_t seed, const Parallelism& par) {
    require_epsilon(epsilon);
    if (!(epsilon < r)) throw InvalidArgument("exit_measure_stats needs epsilon < r");
    if (!(domain.distance_to_boundary(x0) >= 2.0 * r)) throw InvalidArgument("exit_measure_stats needs dist(x0) >= 2r");
    if (n < 2) throw InvalidArgument("exit_measure_stats needs at least two walks");
    const std::size_t dim = x0.dim();

    const std::uint64_t chunks = chunk_count(n);
    std::vector<DirectionStats> partial(chunks);
    for_each_task(chunks, par, [&](std::size_t c) {
        DirectionStats& a = partial[c];
        a.first.resize(dim);
        a.second.resize(dim);
        a.cross.assign(dim * dim, 0.0);
        const std::uint64_t begin = c * kSamplesPerChunk;
        const std::uint64_t end = std::min(n, begin + kSamplesPerChunk);
        for (std::uint64_t j = begin; j < end; ++j) {
            auto out = run_until_exit_ball(domain, x0, epsilon, r, derive_stream(seed, j));
            Point d = out.stop_point - x0;
            double len = norm(d);
            Point u = (1.0 / len) * d;
            for (std::size_t i = 0; i < dim; ++i) {
                a.first[i].add(u[i]);
                a.second[i].add(u[i] * u[i]);
                for (std::size_t k = 0; k < dim; ++k) a.cross[i * dim + k] += u[i] * u[k];
            }
            a.overshoot.add(len - r);
        }
    });
    DirectionStats total;
    for (const auto& p : partial) total.merge(p);

    ExitMeasureStats s;
    s.n = n;
    s.r = r;
    s.epsilon = epsilon;
    s.mean_direction = Point(dim);
    s.mean_direction_stderr = Point(dim);
    s.covariance_diag_stderr = Point(dim);
    s.direction_covariance.assign(dim * dim, 0.0);
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < dim; ++i) {
        s.mean_direction[i] = total.first[i].mean();
        s.mean_direction_stderr[i] = total.first[i].stderr_of_mean();
        s.covariance_diag_stderr[i] = total.second[i].stderr_of_mean();
    }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < dim; ++k)
            s.direction_covariance[i * dim + k] = total.cross[i * dim + k] / nn - s.mean_direction[i] * s.mean_direction[k];
    s.overshoot_mean = total.overshoot.mean();
    s.overshoot_min = total.overshoot.min();
    s.overshoot_max = total.overshoot.max();
    return s;
}

double RegularityReport::min_probability() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : probes) m = std::min(m, p.probability);
    return m;
}

RegularityReport estimate_regularity(const Domain& domain, const Point& y0, double delta, double delta_hat,
                                     const WalkConfig& config, std::size_t probe_count, std::uint64_t n_walks,
                                     std::uint64_t seed, const Parallelism& par) {
    if (!(delta > 0.0 && delta_hat > 0.0 && delta_hat < delta)) {
        throw InvalidArgument("estimate_regularity needs 0 < delta_hat < delta");
    }
    if (probe_count < 1 || n_walks < 2) throw InvalidArgument("estimate_regularity needs probes >= 1 and walks >= 2");
    if (!(std::abs(domain.signed_distance(y0)) <= kBoundaryTol)) {
        throw InvalidArgument("estimate_regularity: y0 = " + to_string(y0) + " is not on the boundary");
    }
    const WalkConfig cfg = config.resolved(domain);

    RegularityReport report;
    report.y0 = y0;
    report.delta = delta;
    report.delta_hat = delta_hat;
    report.epsilon = cfg.epsilon;

    std::vector<Point> probes;
    RngStream probe_stream = derive_stream(mix_seed(seed, 1), 0);
    for (std::size_t k = 0; k < probe_count; ++k) {
        bool found = false;
        for (int t = 0; t < kProbeTrials && !found; ++t) {
            Point x = y0 + delta_hat * sample_unit_ball(probe_stream, y0.dim());
            if (domain.contains(x)) {
                probes.push_back(x);
                found = true;
            }
        }
        if (!found) throw InvalidArgument("estimate_regularity: no interior probe point found near y0");
    }

    auto batches = simulate_walks(
        domain, probes, cfg, n_walks, mix_seed(seed, 2),
        [&](const WalkOutcome& o) { return distance(o.exit_point, y0) < delta ? 1.0 : 0.0; }, par);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        Estimate e = to_estimate(batches[k], n_walks);
        double p = e.mean;
        report.probes.push_back({probes[k], p, std::sqrt(p * (1.0 - p) / static_cast<double>(e.n))});
    }
    return report;
}

Probability estimate_escape_probability(const Domain& domain, const Point& y0, double delta, const Point& x0,
                                        const WalkConfig& config, std::uint64_t n_walks, std::uint64_t seed,
                                        const Parallelism& par) {
    if (!(delta > 0.0)) throw InvalidArgument("escape probability needs delta > 0");
    if (n_walks < 2) throw InvalidArgument("escape probability needs at least two walks");
    require_same_dim(y0, x0, "estimate_escape_probability");
    WalkOptions options;
    options.excursion_origin = y0;
    auto batches = simulate_walks(
        domain, std::span<const Point>(&x0, 1), config, n_walks, seed,
        [&](const WalkOutcome& o) { return o.max_excursion >= delta ? 1.0 : 0.0; }, par, options);
    Estimate e = to_estimate(batches.front(), n_walks);
    return {e.mean, std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(e.n)), e.n};
}

double cone_bound_theta0(std::size_t dim, double ratio) {
    if (dim < 1) throw InvalidArgument("cone bound needs N >= 1");
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw InvalidArgument("cone bound needs a positive finite R");
    const double v_r = profile_function(dim, ratio);
    return (v_r - profile_function(dim, 2.0 + ratio)) / (v_r - profile_function(dim, 3.0 + ratio));
}

MartingaleReport martingale_check(const Domain& domain, const Point& x0, double epsilon, std::uint64_t n,
                                  std::uint64_t seed, const Parallelism& par) {
    require_epsilon(epsilon);
    if (n < 2) throw InvalidArgument("martingale_check needs at least two samples");
    const double radius = std::min(epsilon, domain.distance_to_boundary(x0));
    const std::size_t dim = x0.dim();
    auto acc = chunked<CoordinateStats>(n, seed, par, [&](RngStream& s, CoordinateStats& a) {
        if (a.coords.empty()) a.coords.resize(dim);
        Point y = x0 + radius * sample_unit_ball(s, dim);
        for (std::size_t i = 0; i < dim; ++i) a.coords[i].add(y[i]);
    });
    MartingaleReport r;
    r.mean = Point(dim);
    r.std_error = Point(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        r.mean[i] = acc.coords[i].mean();
        r.std_error[i] = acc.coords[i].stderr_of_mean();
        r.max_deviation_in_stderr = std::max(r.max_deviation_in_stderr, std::abs(r.mean[i] - x0[i]) / r.std_error[i]);
    }
    return r;
}

std::vector<WitnessRow> irregularity_witness(const Domain& domain, const Point& y0, const std::vector<double>& epsilons,
                                             const std::vector<double>& start_distances, const WalkConfig& base,
                                             std::uint64_t n_walks, std::uint64_t seed, const Parallelism& par,
                                             std::optional<Point> direction) {
    if (epsilons.empty() || start_distances.empty()) throw InvalidArgument("irregularity_witness: empty sweep");
    if (!(std::abs(domain.signed_distance(y0)) <= kBoundaryTol)) {
        throw InvalidArgument("irregularity_witness: y0 = " + to_string(y0) + " is not on the boundary");
    }
    auto admissible = [&](const Point& u) {
        return std::all_of(start_distances.begin(), start_distances.end(),
                           [&](double d) { return d > 0.0 && domain.contains(y0 + d * u); });
    };
    Point dir;
    if (direction) {
        require_same_dim(*direction, y0, "irregularity_witness direction");
        dir = (1.0 / norm(*direction)) * *direction;
        if (!admissible(dir)) throw InvalidArgument("irregularity_witness: start points leave the domain");
    } else {
        bool found = false;
        for (std::size_t k = 0; k < 2 * y0.dim() && !found; ++k) {
            Point u = (k % 2 == 0 ? 1.0 : -1.0) * Point::unit(y0.dim(), k / 2);
            if (admissible(u)) {
                dir = u;
                found = true;
            }
        }
        if (!found) throw InvalidArgument("irregularity_witness: no axis direction keeps the start points inside");
    }

    const BoundaryData f = BoundaryData::distance_to(y0);
    std::vector<WitnessRow> rows;
    std::uint64_t k = 0;
    for (double eps : epsilons) {
        WalkConfig cfg = base;
        cfg.epsilon = eps;
        for (double d : start_distances) {
            WitnessRow row;
            row.epsilon = eps;
            row.start_distance = d;
            row.x0 = y0 + d * dir;
            row.estimate = estimate_value(domain, f, row.x0, cfg, n_walks, mix_seed(seed, k++), par);
            row.boundary_value = f(y0);
            rows.push_back(row);
        }
    }
    return rows;
}

double puncture_capture_bound_2d(double radius, double start_distance, double stop_tolerance) {
    if (!(stop_tolerance > 0.0 && stop_tolerance < start_distance && start_distance < radius)) {
        throw InvalidArgument("puncture_capture_bound_2d needs 0 < stop < d < R");
    }
    return std::log(radius / start_distance) / std::log(radius / stop_tolerance);
}

} // namespace ballwalk
