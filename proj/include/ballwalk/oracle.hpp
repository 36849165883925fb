#pragma once

#include "ballwalk/geometry.hpp"
#include "ballwalk/point.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ballwalk {

/// Radial profile v(t) = sgn(N-2) t^(2-N) for N != 2 and -log t for N = 2.
/// x -> v(|x - z0|) is harmonic away from z0.
double profile_function(std::size_t dim, double t);

namespace oracle {

/// u(x) = a . x + b
struct Linear {
    Point a;
    double b;
};

/// u(x) = x^T A x with A symmetric and trace-free.
struct HarmonicQuadratic {
    std::size_t dim;
    std::vector<double> matrix; // row-major dim x dim
};

/// u(x) = v(|x - z0|)
struct FundamentalSolution {
    Point z0;
};

/// Harmonic extension into the unit disk of data tabulated at M equispaced
/// angles theta_k = 2 pi k / M.
struct PoissonDisk {
    std::vector<double> values;
};

} // namespace oracle

/// Closed-form (or quadrature) harmonic function used as ground truth.
class HarmonicOracle {
public:
    using Kind = std::variant<oracle::Linear, oracle::HarmonicQuadratic, oracle::FundamentalSolution,
                              oracle::PoissonDisk>;

    static HarmonicOracle linear(Point a, double b);
    /// Throws unless the matrix is square, symmetric and trace-free (1e-12).
    static HarmonicOracle quadratic(std::size_t dim, std::vector<double> matrix);
    static HarmonicOracle quadratic_diagonal(std::vector<double> diagonal);
    static HarmonicOracle fundamental(Point z0);
    /// Needs at least 64 samples.
    static HarmonicOracle poisson_disk(std::vector<double> values);

    const Kind& kind() const noexcept { return kind_; }
    /// Dimension the oracle is defined in.
    std::size_t dim() const noexcept;

    double eval(const Point& x) const;

    /// Throws unless the oracle is harmonic on the closure of `domain`
    /// (FundamentalSolution needs z0 strictly outside, PoissonDisk needs the
    /// domain inside the unit disk, which is checked for ball domains only).
    void validate_for(const Domain& domain) const;

    /// Spec string, e.g. "quad(1,-1)"; PoissonDisk renders its source label.
    std::string to_spec() const;

    void set_source_label(std::string label) { label_ = std::move(label); }

private:
    explicit HarmonicOracle(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
    std::string label_;
};

/// Trapezoid rule for (1/2pi) int F(theta) (1-|x|^2)/|x - e(theta)|^2 dtheta.
/// Spectrally accurate for smooth data; refuses |x| >= 1 - 1e-6.
double poisson_disk_eval(std::span<const double> values, const Point& x);

/// Laplacian of a harmonic oracle: 0 everywhere.
double laplacian_of(const HarmonicOracle& oracle, const Point& x);

/// Non-harmonic test functions for the averaging expansion.
enum class TestFunction { SquaredNorm, FirstCoordinateQuartic, FirstCoordinate };

double test_function_value(TestFunction f, const Point& x);
/// |x|^2 -> 2N, x1^4 -> 12 x1^2, x1 -> 0.
double laplacian_of(TestFunction f, const Point& x);

/// Parses linear(a1,...,aN;b), quad(d1,...,dN), quad(row;row;...),
/// fundamental(z0), poisson(file.csv).
HarmonicOracle parse_oracle(std::string_view spec);

/// One value per line (blank lines and a non-numeric header ignored); an
/// optional leading angle column must match 2 pi k / M.
std::vector<double> load_circle_samples(const std::string& path);

} // namespace ballwalk
