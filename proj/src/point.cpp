#include "ballwalk/point.hpp"

#include "ballwalk/error.hpp"
#include "ballwalk/format.hpp"

#include <algorithm>
#include <cmath>

namespace ballwalk {

namespace {

void check_dim(std::size_t dim) {
    if (dim < 1 || dim > kMaxDim) {
        throw InvalidArgument("point dimension must be in [1, 16], got " + std::to_string(dim));
    }
}

} // namespace

Point::Point(std::size_t dim) : dim_(dim) { check_dim(dim); }

Point::Point(std::initializer_list<double> coords)
    : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) : dim_(coords.size()) {
    check_dim(dim_);
    std::copy(coords.begin(), coords.end(), c_.begin());
    if (!is_finite()) throw InvalidArgument("point coordinates must be finite");
}

Point Point::unit(std::size_t dim, std::size_t axis) {
    Point p(dim);
    if (axis >= dim) throw InvalidArgument("unit vector axis out of range");
    p.c_[axis] = 1.0;
    return p;
}

bool Point::is_finite() const noexcept {
    return std::all_of(c_.begin(), c_.begin() + dim_, [](double v) { return std::isfinite(v); });
}

Point& Point::operator+=(const Point& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
}

Point& Point::operator-=(const Point& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
}

Point& Point::operator*=(double s) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
}

bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    return std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
}

Point operator+(Point a, const Point& b) noexcept { return a += b; }
Point operator-(Point a, const Point& b) noexcept { return a -= b; }
Point operator*(Point a, double s) noexcept { return a *= s; }
Point operator*(double s, Point a) noexcept { return a *= s; }

double dot(const Point& a, const Point& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Point& a) noexcept {
    // Rescale when the squares would underflow or overflow.
    double m = max_abs(a);
    if (m == 0.0 || (m > 1e-150 && m < 1e150)) return std::sqrt(dot(a, a));
    Point b = (1.0 / m) * a;
    return m * std::sqrt(dot(b, b));
}

double distance(const Point& a, const Point& b) noexcept { return norm(a - b); }

double max_abs(const Point& a) noexcept {
    double m = 0.0;
    for (double v : a.coords()) m = std::max(m, std::abs(v));
    return m;
}

void require_same_dim(const Point& a, const Point& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()) + ")");
    }
}

std::string to_string(const Point& p) {
    std::string out;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        if (i) out += ',';
        out += detail::format_double(p[i]);
    }
    return out;
}

} // namespace ballwalk
