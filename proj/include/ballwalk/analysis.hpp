#pragma once

#include "ballwalk/estimator.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ballwalk {

/// Monte Carlo statistic that should vanish, with its standard error.
struct Residual {
    double residual = 0.0;
    double std_error = 0.0;
};

/// u^eps(x) - A_rho u^eps(x) with rho = min(eps, dist(x)): the value at x
/// against the average of values at n_outer points drawn uniformly from
/// B_rho(x), each estimated with n_inner walks.
///
/// Stages use independent master seeds mix_seed(seed, 0 | 1 | 2) for the
/// centre estimate, the outer sample points and the inner estimates.
Residual mean_value_residual(const Domain& domain, const BoundaryData& f, const Point& x, const WalkConfig& config,
                             std::uint64_t n_outer, std::uint64_t n_inner, std::uint64_t seed,
                             const Parallelism& par = {});

/// avg_{B_eps(x)} u - u(x) - eps^2/(2(N+2)) * laplacian_at_x, the ball
/// average taken over n_samples uniform points.
Residual averaging_residual(const std::function<double(const Point&)>& u, double laplacian_at_x, const Point& x,
                            double epsilon, std::uint64_t n_samples, std::uint64_t seed, const Parallelism& par = {});

/// Statistics of the stopped walk X_tau, tau = first exit from B_r(x0),
/// through the unit directions (X_tau - x0)/|X_tau - x0| and the radial
/// overshoot |X_tau - x0| - r.
struct ExitMeasureStats {
    std::uint64_t n = 0;
    double r = 0.0;
    double epsilon = 0.0;
    Point mean_direction;
    Point mean_direction_stderr;
    std::vector<double> direction_covariance; // N x N row-major
    Point covariance_diag_stderr;
    double overshoot_mean = 0.0;
    double overshoot_min = 0.0;
    double overshoot_max = 0.0;
};

ExitMeasureStats exit_measure_stats(const Domain& domain, const Point& x0, double r, double epsilon, std::uint64_t n,
                                    std::uint64_t seed, const Parallelism& par = {});

struct RegularityProbe {
    Point x0;
    double probability = 0.0;
    double std_error = 0.0;
};

/// P(X^{eps,x0} in B_delta(y0)) at probe points x0 in B_delta_hat(y0) ∩ D.
/// A finite probe set can only be consistent with walk-regularity; it cannot
/// certify it.
struct RegularityReport {
    Point y0;
    double delta = 0.0;
    double delta_hat = 0.0;
    double epsilon = 0.0;
    std::vector<RegularityProbe> probes;

    double min_probability() const;
};

/// Probe points are drawn uniformly from B_delta_hat(y0) by rejection against
/// D; each probe gets 10^4 trials before failing. y0 must satisfy
/// |signed_distance(y0)| <= 1e-9.
RegularityReport estimate_regularity(const Domain& domain, const Point& y0, double delta, double delta_hat,
                                     const WalkConfig& config, std::size_t probe_count, std::uint64_t n_walks,
                                     std::uint64_t seed, const Parallelism& par = {});

struct Probability {
    double p = 0.0;
    double std_error = 0.0; // binomial sqrt(p(1-p)/n)
    std::uint64_t n = 0;
};

/// Fraction of walks with some position x_n (n >= 0, up to termination)
/// outside the open ball B_delta(y0).
Probability estimate_escape_probability(const Domain& domain, const Point& y0, double delta, const Point& x0,
                                        const WalkConfig& config, std::uint64_t n_walks, std::uint64_t seed,
                                        const Parallelism& par = {});

/// Escape bound from an exterior cone with ratio R:
///   theta0 = (v(R) - v(2+R)) / (v(R) - v(3+R)), v = profile_function(N, .).
double cone_bound_theta0(std::size_t dim, double ratio);

/// Radius delta_hat = delta / (4 + 2R) of the ball whose points obey the
/// escape bound for a given delta.
inline double cone_probe_radius(double delta, double ratio) { return delta / (4.0 + 2.0 * ratio); }

struct MartingaleReport {
    double max_deviation_in_stderr = 0.0;
    Point mean;
    Point std_error;
};

/// Simulates one ball-walk step from x0 n times and reports
/// max_i |mean_i - x0_i| / stderr_i.
MartingaleReport martingale_check(const Domain& domain, const Point& x0, double epsilon, std::uint64_t n,
                                  std::uint64_t seed, const Parallelism& par = {});

struct WitnessRow {
    double epsilon = 0.0;
    double start_distance = 0.0;
    Point x0;
    Estimate estimate;
    double boundary_value = 0.0; // F(y0) = 0
};

/// Estimates u^eps(x) for F = |y - y0| at x = y0 + d * direction for every
/// (eps, d). The direction defaults to the first of +e1, -e1, +e2, ... that
/// keeps every start point inside D. Row k uses master seed mix_seed(seed, k).
std::vector<WitnessRow> irregularity_witness(const Domain& domain, const Point& y0, const std::vector<double>& epsilons,
                                             const std::vector<double>& start_distances, const WalkConfig& base,
                                             std::uint64_t n_walks, std::uint64_t seed, const Parallelism& par = {},
                                             std::optional<Point> direction = std::nullopt);

/// Upper bound on the probability that a planar walk started at distance d
/// from the puncture of a punctured disk of radius R stops within `stop` of
/// the puncture: log(R/d) / log(R/stop). From optional stopping of log|x|.
double puncture_capture_bound_2d(double radius, double start_distance, double stop_tolerance);

} // namespace ballwalk
