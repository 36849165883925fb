#pragma once

#include "ballwalk/point.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ballwalk {

class Domain;

namespace shape {

struct Ball {
    Point center;
    double radius;
};

struct Box {
    Point lo;
    Point hi;
};

struct Annulus {
    Point center;
    double inner_radius;
    double outer_radius;
};

/// Ball with its center removed; the center belongs to the boundary.
struct PuncturedBall {
    Point center;
    double radius;
};

/// Open half-space {x : normal . x < offset}, normal stored with unit length.
struct Halfspace {
    Point normal;
    double offset;
};

/// Bounded convex polytope given as an intersection of open half-spaces.
struct HalfspaceIntersection {
    std::vector<Halfspace> halfspaces;
    double diameter; // computed from the vertex set at construction
    Point centroid;  // vertex average, strictly interior
};

/// A \ closure(B).
struct Difference {
    std::shared_ptr<const Domain> a;
    std::shared_ptr<const Domain> b;
};

} // namespace shape

/// Bounded open region of R^N described by a conservative signed distance.
///
/// signed_distance(x) is negative inside, positive outside and zero on the
/// boundary. For Ball, Box, Annulus and PuncturedBall it is exact everywhere;
/// for HalfspaceIntersection it is exact inside and a lower bound on the
/// magnitude outside; Difference(A, B) uses max(sd_A, -sd_B), which is a lower
/// bound on the magnitude everywhere. Walk steps only need a ball around x
/// contained in the domain, so a lower bound is safe.
///
/// Membership is strict: boundary points are exterior.
class Domain {
public:
    using Shape = std::variant<shape::Ball, shape::Box, shape::Annulus, shape::PuncturedBall,
                               shape::HalfspaceIntersection, shape::Difference>;

    static Domain ball(Point center, double radius);
    static Domain box(Point lo, Point hi);
    static Domain annulus(Point center, double inner_radius, double outer_radius);
    static Domain punctured_ball(Point center, double radius);
    /// Each half-space is (normal, offset) meaning normal . x < offset. Normals
    /// need not be unit length. Throws unless the intersection is bounded with
    /// nonempty interior.
    static Domain halfspace_intersection(const std::vector<std::pair<Point, double>>& halfspaces);
    static Domain difference(Domain a, Domain b);

    std::size_t dim() const noexcept { return dim_; }
    const Shape& shape() const noexcept { return shape_; }

    bool contains(const Point& x) const;
    double signed_distance(const Point& x) const;
    /// Lower bound on dist(x, boundary); exact for primitive shapes.
    /// Throws InvalidArgument for points outside the open set.
    double distance_to_boundary(const Point& x) const;
    /// A boundary point p with |p - x| = distance_to_boundary(x) for primitive
    /// shapes. Difference domains refine the projection iteratively until the
    /// result leaves the open set; there |p - x| can exceed the distance bound.
    /// Throws InvalidArgument for exterior points.
    Point nearest_boundary_point(const Point& x) const;
    /// Upper bound on diam(D); exact for primitives and polytopes.
    double diameter() const;

    /// Spec string in the domain mini-grammar, e.g. "ball(0,0;1)".
    std::string to_spec() const;

private:
    Domain(Shape shape, std::size_t dim) : shape_(std::move(shape)), dim_(dim) {}

    /// Projection onto this shape's boundary from either side.
    Point project_to_boundary(const Point& x) const;
    // A point of the shape's interior, used to break rounding ties.
    Point reference_point() const;

    Shape shape_;
    std::size_t dim_;
};

/// Parse the domain mini-grammar: ball(c;r), box(lo;hi), annulus(c;r_in,r_out),
/// punctured_ball(c;r), halfspaces(n1,...,nN,b; ...), diff(A,B). Whitespace is ignored.
Domain parse_domain(std::string_view spec);

/// Finite circular cone with tip, unit axis, half-angle and height.
struct Cone {
    Point tip;
    Point axis;
    double half_angle;
    double height;

    /// Normalizes the axis; throws on degenerate parameters.
    static Cone make(Point tip, Point axis, double half_angle, double height);
    /// Closed-cone membership.
    bool contains(const Point& x) const;
};

/// Largest R such that a ball of radius R*rho centred at distance (1+R)*rho
/// from the tip along the axis touches the cone wall: R = s/(1-s), s = sin(half_angle).
double cone_parameters(const Cone& cone);

/// Largest rho for which that inscribed ball stays below the cone's cap:
/// (1 + 2R) * rho <= height.
double cone_max_rho(const Cone& cone);

} // namespace ballwalk
