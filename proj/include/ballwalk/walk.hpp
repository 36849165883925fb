#pragma once

#include "ballwalk/geometry.hpp"
#include "ballwalk/stochastic.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ballwalk {

enum class WalkKind { Ball, Sphere };

/// Parameters of one walk.
///
/// The exact process runs forever and only converges to the boundary; here a
/// walk stops once distance_to_boundary drops below stop_tolerance and the
/// last position is projected onto the boundary. stop_tolerance defaults to
/// 1e-4 * diam(D) when unset.
struct WalkConfig {
    double epsilon = 0.1;
    std::optional<double> stop_tolerance;
    std::uint64_t max_steps = 10'000'000;
    WalkKind kind = WalkKind::Ball;

    /// Fills the default stop tolerance from the domain and validates:
    /// 0 < epsilon < 1, 0 < stop_tolerance < epsilon, max_steps >= 1.
    WalkConfig resolved(const Domain& domain) const;
};

/// Stopping also triggers once the distance falls below this fraction of
/// max_i |x_i|: below it a step no longer moves x in double precision.
/// Only relevant when stop_tolerance is tiny.
inline constexpr double kRelativeResolutionFloor = 1e-12;

struct WalkOutcome {
    Point exit_point;            // projected onto the boundary
    std::uint64_t steps = 0;
    bool truncated_by_cap = false;
    double max_excursion = 0.0;  // sup_n |x_n - origin|, origin = x0 unless overridden
};

struct StoppedOutcome {
    Point stop_point;
    std::uint64_t stop_step = 0;
};

/// Optional hooks for run_walk.
struct WalkOptions {
    /// Measure max_excursion from this point instead of x0.
    std::optional<Point> excursion_origin;
    /// When set, every position x_0, x_1, ... is appended.
    std::vector<Point>* trace = nullptr;
};

/// x + min(epsilon, dist(x)) * w for w in the open unit ball.
Point ball_walk_step(const Domain& domain, const Point& x, double epsilon, const Point& w);

/// x + min(epsilon, dist(x)/2) * w for w on the unit sphere.
Point sphere_walk_step(const Domain& domain, const Point& x, double epsilon, const Point& w);

/// Runs one walk from x0 until it is within the stop tolerance of the boundary
/// or hits max_steps (then truncated_by_cap is set and the exit point is still
/// the projection). Pure in (domain, x0, config, stream).
WalkOutcome run_walk(const Domain& domain, const Point& x0, const WalkConfig& config, RngStream stream,
                     const WalkOptions& options = {});

/// Ball walk from x0 stopped at the first n >= 1 with |x_n - x0| >= r.
/// Requires dist(x0) >= 2r; throws SimulationError when max_steps is reached.
StoppedOutcome run_until_exit_ball(const Domain& domain, const Point& x0, double epsilon, double r, RngStream stream,
                                   std::uint64_t max_steps = 10'000'000);

} // namespace ballwalk
