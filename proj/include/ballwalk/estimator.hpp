#pragma once

#include "ballwalk/geometry.hpp"
#include "ballwalk/oracle.hpp"
#include "ballwalk/parallel.hpp"
#include "ballwalk/statistics.hpp"
#include "ballwalk/walk.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ballwalk {

class BoundaryData;

namespace data {

struct Coordinate {
    std::size_t index; // 1-based
};
struct Constant {
    double value;
};
/// F(y) = |y - y0|
struct DistanceTo {
    Point y0;
};
struct HarmonicTrace {
    HarmonicOracle oracle;
};
/// Finite sample set extended off the samples by tietze_extend.
struct Tabulated {
    std::vector<Point> points;
    std::vector<double> values;
    std::string label;
};
/// constant + sum_k weight_k * F_k
struct Combination {
    std::vector<std::pair<double, std::shared_ptr<const BoundaryData>>> terms;
    double constant;
};

} // namespace data

/// Boundary data F, evaluable on a neighbourhood of the boundary.
class BoundaryData {
public:
    using Kind = std::variant<data::Coordinate, data::Constant, data::DistanceTo, data::HarmonicTrace,
                              data::Tabulated, data::Combination>;

    static BoundaryData coordinate(std::size_t index_one_based);
    static BoundaryData constant(double c);
    static BoundaryData distance_to(Point y0);
    static BoundaryData harmonic_trace(HarmonicOracle oracle);
    static BoundaryData tabulated(std::vector<Point> points, std::vector<double> values, std::string label = {});
    static BoundaryData combination(std::vector<std::pair<double, BoundaryData>> terms, double constant = 0.0);

    const Kind& kind() const noexcept { return kind_; }
    double operator()(const Point& y) const;
    std::string to_spec() const;

private:
    explicit BoundaryData(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// coordinate(i), constant(c), distance(y0), harmonic(<oracle>), any oracle
/// spec directly, tabulated(file.csv), scaled(a,<data>), sum(<data>,<data>,...).
BoundaryData parse_boundary_data(std::string_view spec);

/// Rows "x1,...,xN,value"; a non-numeric first line is skipped as a header.
BoundaryData load_tabulated(const std::string& path);

/// Hausdorff's extension of data given on a finite set A:
///   F(x) = min_{y in A} { F(y) + |x - y| / dist(x, A) - 1 },   F(x) = F(y) on A.
double tietze_extend(std::span<const Point> points, std::span<const double> values, const Point& x);

/// Monte Carlo estimate with a 95% normal confidence interval.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    std::uint64_t truncated_count = 0;
};

inline constexpr double kZ95 = 1.96;

/// Per start point: statistics of the functional over completed walks.
struct WalkBatch {
    RunningStats stats;
    std::uint64_t truncated = 0;
};

using WalkFunctional = std::function<double(const WalkOutcome&)>;

/// Walks per scheduling chunk. Fixed so that the reduction order, and
/// therefore every bit of the result, is independent of the worker count.
inline constexpr std::uint64_t kChunkWalks = 1024;

/// Stream index for walk `walk` started from grid point `point`:
/// point in the top 24 bits, walk in the low 40.
std::uint64_t walk_stream_index(std::uint64_t point, std::uint64_t walk);

/// Runs n_walks walks from every start point with streams
/// derive_stream(seed, walk_stream_index(point, walk)) and aggregates
/// `functional` over the walks that were not truncated by the step cap.
std::vector<WalkBatch> simulate_walks(const Domain& domain, std::span<const Point> starts, const WalkConfig& config,
                                      std::uint64_t n_walks, std::uint64_t seed, const WalkFunctional& functional,
                                      const Parallelism& par = {}, const WalkOptions& options = {});

/// Turns a batch into an Estimate. Throws SimulationError when every walk was
/// truncated or truncations exceed 0.1% of the walks.
Estimate to_estimate(const WalkBatch& batch, std::uint64_t n_walks);

/// u^eps(x0) = E[F(X^{eps,x0})] from n_walks walks (n_walks >= 2).
Estimate estimate_value(const Domain& domain, const BoundaryData& f, const Point& x0, const WalkConfig& config,
                        std::uint64_t n_walks, std::uint64_t seed, const Parallelism& par = {});

struct FieldEntry {
    Point point;
    bool interior = false; // exterior grid points are skipped, estimate left empty
    Estimate estimate;
};

/// One estimate per interior grid point; point k uses stream indices
/// walk_stream_index(k, 0..n_walks), so a single-point grid reproduces
/// estimate_value exactly.
std::vector<FieldEntry> estimate_field(const Domain& domain, const BoundaryData& f, std::span<const Point> grid,
                                       const WalkConfig& config, std::uint64_t n_walks, std::uint64_t seed,
                                       const Parallelism& par = {});

/// Projection bias allowance L * stop_tolerance * (1 + K) for data with
/// Lipschitz constant L and projection constant K (1 for primitive shapes).
inline double projection_bias_budget(double lipschitz, double stop_tolerance, double projection_constant = 1.0) {
    return lipschitz * stop_tolerance * (1.0 + projection_constant);
}

} // namespace ballwalk
