#include "ballwalk/walk.hpp"

#include "ballwalk/error.hpp"

#include <algorithm>
#include <cmath>

namespace ballwalk {

namespace {

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
}

} // namespace

WalkConfig WalkConfig::resolved(const Domain& domain) const {
    require_epsilon(epsilon);
    WalkConfig out = *this;
    if (!out.stop_tolerance) out.stop_tolerance = 1e-4 * domain.diameter();
    if (!(*out.stop_tolerance > 0.0 && *out.stop_tolerance < epsilon)) {
        throw InvalidArgument("stop_tolerance must lie in (0, epsilon)");
    }
    if (max_steps < 1) throw InvalidArgument("max_steps must be at least 1");
    return out;
}

Point ball_walk_step(const Domain& domain, const Point& x, double epsilon, const Point& w) {
    require_same_dim(x, w, "ball_walk_step");
    double radius = std::min(epsilon, domain.distance_to_boundary(x));
    return x + radius * w;
}

Point sphere_walk_step(const Domain& domain, const Point& x, double epsilon, const Point& w) {
    require_same_dim(x, w, "sphere_walk_step");
    double radius = std::min(epsilon, 0.5 * domain.distance_to_boundary(x));
    return x + radius * w;
}

WalkOutcome run_walk(const Domain& domain, const Point& x0, const WalkConfig& config, RngStream stream,
                     const WalkOptions& options) {
    const WalkConfig cfg = config.resolved(domain);
    const double tol = *cfg.stop_tolerance;
    const std::size_t dim = domain.dim();
    require_same_dim(x0, Point(dim), "run_walk");

    double sd = domain.signed_distance(x0);
    if (!(sd < 0.0)) throw InvalidArgument("run_walk: start point " + to_string(x0) + " is not interior");

    const Point origin = options.excursion_origin.value_or(x0);
    require_same_dim(origin, x0, "run_walk excursion origin");

    WalkOutcome out;
    Point x = x0;
    double dist = -sd;
    out.max_excursion = distance(x, origin);
    if (options.trace) options.trace->push_back(x);

    while (dist >= tol && dist >= kRelativeResolutionFloor * max_abs(x)) {
        if (out.steps == cfg.max_steps) {
            out.truncated_by_cap = true;
            break;
        }
        Point y = x;
        if (cfg.kind == WalkKind::Ball) {
            y += std::min(cfg.epsilon, dist) * sample_unit_ball(stream, dim);
        } else {
            y += std::min(cfg.epsilon, 0.5 * dist) * sample_unit_sphere(stream, dim);
        }
        if (!y.is_finite()) throw SimulationError("run_walk: non-finite position (geometry bug?)");
        double next = domain.signed_distance(y);
        // Rounding can push a step taken from within a few ulps of the
        // boundary onto it; x is then as close as the arithmetic allows.
        if (!(next < 0.0)) break;
        x = y;
        dist = -next;
        ++out.steps;
        out.max_excursion = std::max(out.max_excursion, distance(x, origin));
        if (options.trace) options.trace->push_back(x);
    }
    out.exit_point = domain.nearest_boundary_point(x);
    return out;
}

StoppedOutcome run_until_exit_ball(const Domain& domain, const Point& x0, double epsilon, double r, RngStream stream,
                                   std::uint64_t max_steps) {
    require_epsilon(epsilon);
    if (!(r > 0.0)) throw InvalidArgument("run_until_exit_ball: r must be positive");
    if (!(domain.distance_to_boundary(x0) >= 2.0 * r)) {
        throw InvalidArgument("run_until_exit_ball: need dist(x0, boundary) >= 2r");
    }
    const std::size_t dim = domain.dim();
    Point x = x0;
    for (std::uint64_t step = 1; step <= max_steps; ++step) {
        double radius = std::min(epsilon, domain.distance_to_boundary(x));
        x += radius * sample_unit_ball(stream, dim);
        if (distance(x, x0) >= r) return {x, step};
    }
    throw SimulationError("run_until_exit_ball: step cap reached");
}

} // namespace ballwalk
