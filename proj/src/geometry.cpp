#include "ballwalk/geometry.hpp"

#include "ballwalk/error.hpp"
#include "ballwalk/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace ballwalk {

namespace {

constexpr double kFeasibilityTol = 1e-9;
constexpr std::size_t kMaxVertexCombinations = 2'000'000;
constexpr int kMaxProjectionRefinements = 64;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

// Radial projection onto the sphere |y - c| = r; picks +e1 when x == c.
Point radial(const Point& c, double r, const Point& x) {
    Point d = x - c;
    double len = norm(d);
    if (len == 0.0) return c + r * Point::unit(c.dim(), 0);
    return c + (r / len) * d;
}

// Euclidean projection onto a polytope from outside (Dykstra's algorithm).
Point project_onto_polytope(const shape::HalfspaceIntersection& s, const Point& x) {
    const std::size_t m = s.halfspaces.size();
    std::vector<Point> corr(m, Point(x.dim()));
    Point y = x;
    for (int sweep = 0; sweep < 20000; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& h = s.halfspaces[i];
            Point z = y + corr[i];
            double g = dot(h.normal, z) - h.offset;
            Point next = g > 0.0 ? z - g * h.normal : z;
            corr[i] = z - next;
            moved = std::max(moved, distance(next, y));
            y = next;
        }
        if (moved <= 1e-15 * std::max(1.0, max_abs(y))) break;
    }
    return y;
}

// Solves A v = b in place (row-major n x n) with partial pivoting.
std::optional<Point> solve_linear(std::vector<double> a, Point b) {
    const std::size_t n = b.dim();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-12) return std::nullopt;
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    Point v(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * v[k];
        v[i] = s / a[i * n + i];
    }
    return v;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(r + 0.5);
}

// Vertices of {x : n_i . x <= b_i} by enumerating every N-subset of active
// constraints. Exponential in general; guarded by kMaxVertexCombinations.
std::vector<Point> enumerate_vertices(const std::vector<shape::Halfspace>& hs, std::size_t dim) {
    const std::size_t m = hs.size();
    if (binomial(m, dim) > kMaxVertexCombinations) {
        throw InvalidArgument("halfspace intersection too large for vertex enumeration");
    }
    std::vector<Point> vertices;
    std::vector<std::size_t> idx(dim);
    for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
    if (m < dim) return vertices;
    while (true) {
        std::vector<double> a(dim * dim);
        Point b(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t k = 0; k < dim; ++k) a[r * dim + k] = hs[idx[r]].normal[k];
            b[r] = hs[idx[r]].offset;
        }
        if (auto v = solve_linear(std::move(a), b)) {
            bool feasible = std::all_of(hs.begin(), hs.end(), [&](const shape::Halfspace& h) {
                return dot(h.normal, *v) <= h.offset + kFeasibilityTol;
            });
            if (feasible) vertices.push_back(*v);
        }
        // next combination
        std::size_t i = dim;
        while (i > 0 && idx[i - 1] == m - dim + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < dim; ++j) idx[j] = idx[j - 1] + 1;
    }
    return vertices;
}

double sd_ball(const shape::Ball& s, const Point& x) { return distance(x, s.center) - s.radius; }

double sd_box(const shape::Box& s, const Point& x) {
    double outside = 0.0;
    double inside = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.dim(); ++i) {
        double half = 0.5 * (s.hi[i] - s.lo[i]);
        double mid = 0.5 * (s.hi[i] + s.lo[i]);
        double q = std::abs(x[i] - mid) - half;
        if (q > 0.0) outside += q * q;
        inside = std::max(inside, q);
    }
    return outside > 0.0 ? std::sqrt(outside) : inside;
}

double sd_annulus(const shape::Annulus& s, const Point& x) {
    double rho = distance(x, s.center);
    return std::max(rho - s.outer_radius, s.inner_radius - rho);
}

double sd_punctured(const shape::PuncturedBall& s, const Point& x) {
    double rho = distance(x, s.center);
    if (rho >= s.radius) return rho - s.radius;
    return -std::min(s.radius - rho, rho);
}

double sd_polytope(const shape::HalfspaceIntersection& s, const Point& x) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& h : s.halfspaces) v = std::max(v, dot(h.normal, x) - h.offset);
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// construction

Domain Domain::ball(Point center, double radius) {
    require_positive(radius, "ball radius");
    std::size_t n = center.dim();
    return Domain(shape::Ball{std::move(center), radius}, n);
}

Domain Domain::box(Point lo, Point hi) {
    require_same_dim(lo, hi, "box corners");
    for (std::size_t i = 0; i < lo.dim(); ++i) {
        if (!(lo[i] < hi[i])) throw InvalidArgument("box corners must be strictly ordered on every axis");
    }
    std::size_t n = lo.dim();
    return Domain(shape::Box{std::move(lo), std::move(hi)}, n);
}

Domain Domain::annulus(Point center, double inner_radius, double outer_radius) {
    require_positive(inner_radius, "annulus inner radius");
    require_positive(outer_radius, "annulus outer radius");
    if (!(inner_radius < outer_radius)) throw InvalidArgument("annulus needs inner_radius < outer_radius");
    std::size_t n = center.dim();
    return Domain(shape::Annulus{std::move(center), inner_radius, outer_radius}, n);
}

Domain Domain::punctured_ball(Point center, double radius) {
    require_positive(radius, "punctured ball radius");
    std::size_t n = center.dim();
    return Domain(shape::PuncturedBall{std::move(center), radius}, n);
}

Domain Domain::halfspace_intersection(const std::vector<std::pair<Point, double>>& halfspaces) {
    if (halfspaces.empty()) throw InvalidArgument("halfspace intersection needs at least one halfspace");
    const std::size_t n = halfspaces.front().first.dim();
    std::vector<shape::Halfspace> hs;
    for (const auto& [normal, offset] : halfspaces) {
        if (normal.dim() != n) throw InvalidArgument("halfspace normals must share one dimension");
        double len = norm(normal);
        if (!(len > 0.0)) throw InvalidArgument("halfspace normal must be nonzero");
        if (!std::isfinite(offset)) throw InvalidArgument("halfspace offset must be finite");
        hs.push_back({(1.0 / len) * normal, offset / len});
    }

    // Bounded iff the recession cone {d : n_i . d <= 0} is trivial. Intersect
    // it with the cube |d_j| <= 1 and look for a nonzero vertex.
    std::vector<shape::Halfspace> cone;
    for (const auto& h : hs) cone.push_back({h.normal, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
        cone.push_back({Point::unit(n, j), 1.0});
        cone.push_back({-1.0 * Point::unit(n, j), 1.0});
    }
    for (const auto& v : enumerate_vertices(cone, n)) {
        if (norm(v) > 1e-7) throw InvalidArgument("halfspace intersection is unbounded");
    }

    auto vertices = enumerate_vertices(hs, n);
    if (vertices.size() < n + 1) throw InvalidArgument("halfspace intersection is empty or degenerate");
    Point centroid(n);
    for (const auto& v : vertices) centroid += v;
    centroid *= 1.0 / static_cast<double>(vertices.size());
    shape::HalfspaceIntersection poly{std::move(hs), 0.0, centroid};
    if (!(sd_polytope(poly, centroid) < -kFeasibilityTol)) {
        throw InvalidArgument("halfspace intersection has empty interior");
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j) diam = std::max(diam, distance(vertices[i], vertices[j]));
    poly.diameter = diam;
    return Domain(std::move(poly), n);
}

Domain Domain::difference(Domain a, Domain b) {
    if (a.dim() != b.dim()) throw InvalidArgument("difference operands must share one dimension");
    std::size_t n = a.dim();
    return Domain(shape::Difference{std::make_shared<const Domain>(std::move(a)),
                                    std::make_shared<const Domain>(std::move(b))},
                  n);
}

// ---------------------------------------------------------------------------
// queries

double Domain::signed_distance(const Point& x) const {
    if (x.dim() != dim_) {
        throw InvalidArgument("domain query: dimension mismatch (domain " + std::to_string(dim_) + ", point " +
                              std::to_string(x.dim()) + ")");
    }
    return std::visit(overloaded{
                          [&](const shape::Ball& s) { return sd_ball(s, x); },
                          [&](const shape::Box& s) { return sd_box(s, x); },
                          [&](const shape::Annulus& s) { return sd_annulus(s, x); },
                          [&](const shape::PuncturedBall& s) { return sd_punctured(s, x); },
                          [&](const shape::HalfspaceIntersection& s) { return sd_polytope(s, x); },
                          [&](const shape::Difference& s) {
                              return std::max(s.a->signed_distance(x), -s.b->signed_distance(x));
                          },
                      },
                      shape_);
}

bool Domain::contains(const Point& x) const { return signed_distance(x) < 0.0; }

double Domain::distance_to_boundary(const Point& x) const {
    double sd = signed_distance(x);
    if (!(sd < 0.0)) throw InvalidArgument("distance_to_boundary: point " + to_string(x) + " is not interior");
    return -sd;
}

Point Domain::project_to_boundary(const Point& x) const {
    return std::visit(
        overloaded{
            [&](const shape::Ball& s) { return radial(s.center, s.radius, x); },
            [&](const shape::Box& s) {
                Point p = x;
                if (sd_box(s, x) > 0.0) {
                    for (std::size_t i = 0; i < p.dim(); ++i) p[i] = std::clamp(p[i], s.lo[i], s.hi[i]);
                    return p;
                }
                std::size_t best = 0;
                double gap = std::numeric_limits<double>::infinity();
                bool to_lo = true;
                for (std::size_t i = 0; i < p.dim(); ++i) {
                    if (x[i] - s.lo[i] < gap) { gap = x[i] - s.lo[i]; best = i; to_lo = true; }
                    if (s.hi[i] - x[i] < gap) { gap = s.hi[i] - x[i]; best = i; to_lo = false; }
                }
                p[best] = to_lo ? s.lo[best] : s.hi[best];
                return p;
            },
            [&](const shape::Annulus& s) {
                double rho = distance(x, s.center);
                bool outer = std::abs(rho - s.outer_radius) <= std::abs(rho - s.inner_radius);
                return radial(s.center, outer ? s.outer_radius : s.inner_radius, x);
            },
            [&](const shape::PuncturedBall& s) {
                double rho = distance(x, s.center);
                if (rho < s.radius && rho <= s.radius - rho) return s.center;
                return radial(s.center, s.radius, x);
            },
            [&](const shape::HalfspaceIntersection& s) {
                // Foot on the plane realising the signed distance. Exact from
                // inside; from outside it is the most violated plane.
                const shape::Halfspace* best = &s.halfspaces.front();
                double v = -std::numeric_limits<double>::infinity();
                for (const auto& h : s.halfspaces) {
                    double g = dot(h.normal, x) - h.offset;
                    if (g > v) { v = g; best = &h; }
                }
                if (v <= 0.0) return x - v * best->normal;
                return project_onto_polytope(s, x);
            },
            [&](const shape::Difference& s) {
                return s.a->signed_distance(x) >= -s.b->signed_distance(x) ? s.a->project_to_boundary(x)
                                                                          : s.b->project_to_boundary(x);
            },
        },
        shape_);
}

Point Domain::nearest_boundary_point(const Point& x) const {
    if (!contains(x)) throw InvalidArgument("nearest_boundary_point: point " + to_string(x) + " is not interior");
    Point p = project_to_boundary(x);
    // Composite shapes: a projection onto one operand can land back inside
    // the open set; keep projecting from there.
    for (int i = 0; i < kMaxProjectionRefinements && contains(p); ++i) p = project_to_boundary(p);
    // Rounding can leave the foot a few ulps inside. Push it out along x -> p,
    // or into the removed set for a difference.
    if (contains(p)) {
        std::vector<Point> dirs;
        if (distance(p, x) > 0.0) dirs.push_back(p - x);
        if (const auto* d = std::get_if<shape::Difference>(&shape_)) dirs.push_back(d->b->reference_point() - p);
        for (const Point& raw : dirs) {
            if (!(norm(raw) > 0.0)) continue;
            Point dir = (1.0 / norm(raw)) * raw;
            double step = std::numeric_limits<double>::epsilon() * std::max(1.0, max_abs(p));
            Point q = p;
            for (int i = 0; i < 32 && contains(q); ++i, step *= 2.0) q = p + step * dir;
            if (!contains(q)) { p = q; break; }
        }
    }
    if (contains(p)) throw SimulationError("nearest_boundary_point: projection did not reach the boundary");
    return p;
}

Point Domain::reference_point() const {
    return std::visit(overloaded{
                          [](const shape::Ball& s) { return s.center; },
                          [](const shape::Box& s) { return 0.5 * (s.lo + s.hi); },
                          [](const shape::Annulus& s) {
                              return s.center + 0.5 * (s.inner_radius + s.outer_radius) * Point::unit(s.center.dim(), 0);
                          },
                          [](const shape::PuncturedBall& s) { return s.center + 0.5 * s.radius * Point::unit(s.center.dim(), 0); },
                          [](const shape::HalfspaceIntersection& s) { return s.centroid; },
                          [](const shape::Difference& s) { return s.a->reference_point(); },
                      },
                      shape_);
}

double Domain::diameter() const {
    return std::visit(overloaded{
                          [](const shape::Ball& s) { return 2.0 * s.radius; },
                          [](const shape::Box& s) { return distance(s.lo, s.hi); },
                          [](const shape::Annulus& s) { return 2.0 * s.outer_radius; },
                          [](const shape::PuncturedBall& s) { return 2.0 * s.radius; },
                          [](const shape::HalfspaceIntersection& s) { return s.diameter; },
                          [](const shape::Difference& s) { return s.a->diameter(); },
                      },
                      shape_);
}

std::string Domain::to_spec() const {
    using detail::format_double;
    return std::visit(
        overloaded{
            [](const shape::Ball& s) { return "ball(" + to_string(s.center) + ";" + format_double(s.radius) + ")"; },
            [](const shape::Box& s) { return "box(" + to_string(s.lo) + ";" + to_string(s.hi) + ")"; },
            [](const shape::Annulus& s) {
                return "annulus(" + to_string(s.center) + ";" + format_double(s.inner_radius) + "," +
                       format_double(s.outer_radius) + ")";
            },
            [](const shape::PuncturedBall& s) {
                return "punctured_ball(" + to_string(s.center) + ";" + format_double(s.radius) + ")";
            },
            [](const shape::HalfspaceIntersection& s) {
                std::string out = "halfspaces(";
                for (std::size_t i = 0; i < s.halfspaces.size(); ++i) {
                    if (i) out += ";";
                    out += to_string(s.halfspaces[i].normal) + "," + format_double(s.halfspaces[i].offset);
                }
                return out + ")";
            },
            [](const shape::Difference& s) { return "diff(" + s.a->to_spec() + "," + s.b->to_spec() + ")"; },
        },
        shape_);
}

// ---------------------------------------------------------------------------
// cones

Cone Cone::make(Point tip, Point axis, double half_angle, double height) {
    require_same_dim(tip, axis, "cone");
    double len = norm(axis);
    if (!(len > 0.0)) throw InvalidArgument("cone axis must be nonzero");
    if (!(half_angle > 0.0 && half_angle < std::numbers::pi / 2)) {
        throw InvalidArgument("cone half-angle must lie in (0, pi/2)");
    }
    require_positive(height, "cone height");
    return Cone{std::move(tip), (1.0 / len) * axis, half_angle, height};
}

bool Cone::contains(const Point& x) const {
    Point d = x - tip;
    double along = dot(d, axis);
    if (along < 0.0 || along > height) return false;
    double r = norm(d);
    return r == 0.0 || along >= r * std::cos(half_angle);
}

double cone_parameters(const Cone& cone) {
    if (!(cone.half_angle > 0.0 && cone.half_angle < std::numbers::pi / 2) || !(cone.height > 0.0)) {
        throw InvalidArgument("degenerate cone");
    }
    double s = std::sin(cone.half_angle);
    return s / (1.0 - s);
}

double cone_max_rho(const Cone& cone) { return cone.height / (1.0 + 2.0 * cone_parameters(cone)); }

} // namespace ballwalk
