#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

namespace ballwalk {

inline constexpr std::size_t kMaxDim = 16;

/// Coordinate vector in R^N, 1 <= N <= 16, with inline storage.
///
/// The dimension is runtime data so a single binary serves every N.
class Point {
public:
    Point() = default;
    /// Origin of R^dim.
    explicit Point(std::size_t dim);
    Point(std::initializer_list<double> coords);
    explicit Point(std::span<const double> coords);

    /// Unit vector along axis `axis` (0-based).
    static Point unit(std::size_t dim, std::size_t axis);

    std::size_t dim() const noexcept { return dim_; }
    double operator[](std::size_t i) const noexcept { return c_[i]; }
    double& operator[](std::size_t i) noexcept { return c_[i]; }

    std::span<const double> coords() const noexcept { return {c_.data(), dim_}; }
    std::span<double> coords() noexcept { return {c_.data(), dim_}; }

    bool is_finite() const noexcept;

    Point& operator+=(const Point& o) noexcept;
    Point& operator-=(const Point& o) noexcept;
    Point& operator*=(double s) noexcept;

    friend bool operator==(const Point& a, const Point& b) noexcept;

private:
    std::array<double, kMaxDim> c_{};
    std::size_t dim_ = 0;
};

Point operator+(Point a, const Point& b) noexcept;
Point operator-(Point a, const Point& b) noexcept;
Point operator*(Point a, double s) noexcept;
Point operator*(double s, Point a) noexcept;

double dot(const Point& a, const Point& b) noexcept;
double norm(const Point& a) noexcept;
double distance(const Point& a, const Point& b) noexcept;
/// max_i |a_i|
double max_abs(const Point& a) noexcept;

/// Throws InvalidArgument unless both points have the same dimension.
void require_same_dim(const Point& a, const Point& b, const char* what);

/// Comma-separated coordinates with round-trip precision.
std::string to_string(const Point& p);

} // namespace ballwalk
