#include "ballwalk/estimator.hpp"

#include "ballwalk/error.hpp"
#include "ballwalk/format.hpp"
#include "ballwalk/spec_syntax.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace ballwalk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kMaxWalksPerPoint = std::uint64_t{1} << 40;
constexpr std::uint64_t kMaxPoints = std::uint64_t{1} << 24;
constexpr double kMaxTruncatedFraction = 1e-3;

} // namespace

// ---------------------------------------------------------------------------
// boundary data

BoundaryData BoundaryData::coordinate(std::size_t index) {
    if (index < 1 || index > kMaxDim) throw InvalidArgument("coordinate index must be in 1..16");
    return BoundaryData(data::Coordinate{index});
}

BoundaryData BoundaryData::constant(double c) {
    if (!std::isfinite(c)) throw InvalidArgument("constant boundary data must be finite");
    return BoundaryData(data::Constant{c});
}

BoundaryData BoundaryData::distance_to(Point y0) { return BoundaryData(data::DistanceTo{std::move(y0)}); }

BoundaryData BoundaryData::harmonic_trace(HarmonicOracle oracle) { return BoundaryData(data::HarmonicTrace{std::move(oracle)}); }

BoundaryData BoundaryData::tabulated(std::vector<Point> points, std::vector<double> values, std::string label) {
    if (points.empty()) throw InvalidArgument("tabulated boundary data needs at least one sample");
    if (points.size() != values.size()) throw InvalidArgument("tabulated boundary data: points/values size mismatch");
    for (const auto& p : points) require_same_dim(p, points.front(), "tabulated boundary data");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidArgument("tabulated boundary values must be finite");
    return BoundaryData(data::Tabulated{std::move(points), std::move(values), std::move(label)});
}

BoundaryData BoundaryData::combination(std::vector<std::pair<double, BoundaryData>> terms, double constant) {
    data::Combination c{{}, constant};
    for (auto& [w, f] : terms) c.terms.emplace_back(w, std::make_shared<const BoundaryData>(std::move(f)));
    return BoundaryData(std::move(c));
}

double BoundaryData::operator()(const Point& y) const {
    return std::visit(overloaded{
                          [&](const data::Coordinate& d) {
                              if (d.index > y.dim()) throw InvalidArgument("coordinate index exceeds dimension");
                              return y[d.index - 1];
                          },
                          [](const data::Constant& d) { return d.value; },
                          [&](const data::DistanceTo& d) {
                              require_same_dim(y, d.y0, "distance data");
                              return distance(y, d.y0);
                          },
                          [&](const data::HarmonicTrace& d) { return d.oracle.eval(y); },
                          [&](const data::Tabulated& d) { return tietze_extend(d.points, d.values, y); },
                          [&](const data::Combination& d) {
                              double s = d.constant;
                              for (const auto& [w, f] : d.terms) s += w * (*f)(y);
                              return s;
                          },
                      },
                      kind_);
}

std::string BoundaryData::to_spec() const {
    using detail::format_double;
    return std::visit(overloaded{
                          [](const data::Coordinate& d) { return "coordinate(" + std::to_string(d.index) + ")"; },
                          [](const data::Constant& d) { return "constant(" + format_double(d.value) + ")"; },
                          [](const data::DistanceTo& d) { return "distance(" + to_string(d.y0) + ")"; },
                          [](const data::HarmonicTrace& d) { return "harmonic(" + d.oracle.to_spec() + ")"; },
                          [](const data::Tabulated& d) {
                              return "tabulated(" + (d.label.empty() ? std::to_string(d.points.size()) + "-samples" : d.label) + ")";
                          },
                          [](const data::Combination& d) {
                              std::string out = "sum(";
                              for (const auto& [w, f] : d.terms) out += "scaled(" + format_double(w) + "," + f->to_spec() + "),";
                              return out + "constant(" + format_double(d.constant) + "))";
                          },
                      },
                      kind_);
}

BoundaryData load_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open tabulated data '" + path + "'");
    std::vector<Point> points;
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> nums;
        try {
            nums = spec::parse_numbers(line);
        } catch (const ParseError&) {
            if (first) {
                first = false;
                continue;
            }
            throw;
        }
        first = false;
        if (nums.size() < 2) throw ParseError("tabulated data rows need coordinates and a value");
        values.push_back(nums.back());
        points.emplace_back(std::span<const double>(nums.data(), nums.size() - 1));
    }
    return BoundaryData::tabulated(std::move(points), std::move(values), path);
}

BoundaryData parse_boundary_data(std::string_view text) {
    auto call = spec::parse_call(text);
    const auto& name = call.name;
    if (name == "coordinate") {
        double i = spec::parse_number(call.args);
        if (i != std::floor(i) || i < 1) throw ParseError("coordinate(i) needs a positive integer index");
        return BoundaryData::coordinate(static_cast<std::size_t>(i));
    }
    if (name == "constant") return BoundaryData::constant(spec::parse_number(call.args));
    if (name == "distance") return BoundaryData::distance_to(Point(spec::parse_numbers(call.args)));
    if (name == "harmonic") return BoundaryData::harmonic_trace(parse_oracle(call.args));
    if (name == "tabulated") return load_tabulated(call.args);
    if (name == "scaled") {
        auto parts = spec::split_top_level(call.args, ',');
        if (parts.size() != 2) throw ParseError("scaled(a,<data>) expected");
        return BoundaryData::combination({{spec::parse_number(parts[0]), parse_boundary_data(parts[1])}});
    }
    if (name == "sum") {
        std::vector<std::pair<double, BoundaryData>> terms;
        for (const auto& part : spec::split_top_level(call.args, ',')) terms.emplace_back(1.0, parse_boundary_data(part));
        return BoundaryData::combination(std::move(terms));
    }
    if (name == "linear" || name == "quad" || name == "fundamental" || name == "poisson") {
        return BoundaryData::harmonic_trace(parse_oracle(text));
    }
    throw ParseError("unknown boundary data '" + name + "'");
}

double tietze_extend(std::span<const Point> points, std::span<const double> values, const Point& x) {
    if (points.empty() || points.size() != values.size()) throw InvalidArgument("tietze_extend: bad sample set");
    double dist_a = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points.size(); ++k) {
        require_same_dim(points[k], x, "tietze_extend");
        double d = distance(x, points[k]);
        if (d == 0.0) return values[k];
        dist_a = std::min(dist_a, d);
    }
    // The -1 sits inside the minimum as in Hausdorff's formula; it is constant
    // so the grouping does not change the value.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points.size(); ++k) {
        best = std::min(best, values[k] + distance(x, points[k]) / dist_a - 1.0);
    }
    return best;
}

// ---------------------------------------------------------------------------
// simulation engine

std::uint64_t walk_stream_index(std::uint64_t point, std::uint64_t walk) {
    if (point >= kMaxPoints || walk >= kMaxWalksPerPoint) throw InvalidArgument("walk stream index out of range");
    return (point << 40) | walk;
}

namespace {

std::vector<WalkBatch> simulate_with_ids(const Domain& domain, std::span<const Point> starts,
                                         std::span<const std::uint64_t> stream_points, const WalkConfig& config,
                                         std::uint64_t n_walks, std::uint64_t seed, const WalkFunctional& functional,
                                         const Parallelism& par, const WalkOptions& options) {
    if (starts.size() > kMaxPoints) throw InvalidArgument("too many start points");
    if (n_walks > kMaxWalksPerPoint) throw InvalidArgument("too many walks per point");
    const WalkConfig cfg = config.resolved(domain);
    for (const auto& s : starts) {
        require_same_dim(s, Point(domain.dim()), "simulate_walks");
        if (!domain.contains(s)) throw InvalidArgument("simulate_walks: start point " + to_string(s) + " is not interior");
    }

    const std::uint64_t chunks_per_point = (n_walks + kChunkWalks - 1) / kChunkWalks;
    const std::size_t n_tasks = starts.size() * chunks_per_point;
    std::vector<WalkBatch> partial(n_tasks);

    for_each_task(n_tasks, par, [&](std::size_t task) {
        const std::uint64_t point = task / chunks_per_point;
        const std::uint64_t chunk = task % chunks_per_point;
        const std::uint64_t begin = chunk * kChunkWalks;
        const std::uint64_t end = std::min(n_walks, begin + kChunkWalks);
        WalkBatch& out = partial[task];
        for (std::uint64_t w = begin; w < end; ++w) {
            auto stream = derive_stream(seed, walk_stream_index(stream_points[point], w));
            auto outcome = run_walk(domain, starts[point], cfg, stream, options);
            if (outcome.truncated_by_cap) {
                ++out.truncated;
                continue;
            }
            out.stats.add(functional(outcome));
        }
    });

    // Fixed-order reduction.
    std::vector<WalkBatch> result(starts.size());
    for (std::size_t task = 0; task < n_tasks; ++task) {
        WalkBatch& dst = result[task / chunks_per_point];
        dst.stats.merge(partial[task].stats);
        dst.truncated += partial[task].truncated;
    }
    return result;
}

} // namespace

std::vector<WalkBatch> simulate_walks(const Domain& domain, std::span<const Point> starts, const WalkConfig& config,
                                      std::uint64_t n_walks, std::uint64_t seed, const WalkFunctional& functional,
                                      const Parallelism& par, const WalkOptions& options) {
    std::vector<std::uint64_t> ids(starts.size());
    for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = k;
    return simulate_with_ids(domain, starts, ids, config, n_walks, seed, functional, par, options);
}

Estimate to_estimate(const WalkBatch& batch, std::uint64_t n_walks) {
    if (batch.stats.count() == 0) throw SimulationError("every walk was truncated by the step cap");
    if (static_cast<double>(batch.truncated) > kMaxTruncatedFraction * static_cast<double>(n_walks)) {
        throw SimulationError(std::to_string(batch.truncated) + " of " + std::to_string(n_walks) +
                              " walks hit the step cap (limit 0.1%)");
    }
    Estimate e;
    e.mean = batch.stats.mean();
    e.std_error = batch.stats.stderr_of_mean();
    e.n = batch.stats.count();
    e.ci95_lo = e.mean - kZ95 * e.std_error;
    e.ci95_hi = e.mean + kZ95 * e.std_error;
    e.truncated_count = batch.truncated;
    return e;
}

Estimate estimate_value(const Domain& domain, const BoundaryData& f, const Point& x0, const WalkConfig& config,
                        std::uint64_t n_walks, std::uint64_t seed, const Parallelism& par) {
    if (n_walks < 2) throw InvalidArgument("estimate_value needs at least two walks");
    auto batches = simulate_walks(domain, std::span<const Point>(&x0, 1), config, n_walks, seed,
                                  [&](const WalkOutcome& o) { return f(o.exit_point); }, par);
    return to_estimate(batches.front(), n_walks);
}

std::vector<FieldEntry> estimate_field(const Domain& domain, const BoundaryData& f, std::span<const Point> grid,
                                       const WalkConfig& config, std::uint64_t n_walks, std::uint64_t seed,
                                       const Parallelism& par) {
    if (grid.empty()) throw InvalidArgument("estimate_field: empty grid");
    if (n_walks < 2) throw InvalidArgument("estimate_field needs at least two walks per point");
    std::vector<FieldEntry> out(grid.size());
    std::vector<Point> interior;
    std::vector<std::size_t> where;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out[k].point = grid[k];
        require_same_dim(grid[k], Point(domain.dim()), "estimate_field");
        if (domain.contains(grid[k])) {
            out[k].interior = true;
            interior.push_back(grid[k]);
            where.push_back(k);
        }
    }
    if (interior.empty()) return out;

    // Streams are keyed by grid index, not by position among interior points.
    std::vector<std::uint64_t> ids(where.begin(), where.end());
    auto batches = simulate_with_ids(domain, interior, ids, config, n_walks, seed,
                                     [&](const WalkOutcome& o) { return f(o.exit_point); }, par, {});
    for (std::size_t local = 0; local < interior.size(); ++local) out[where[local]].estimate = to_estimate(batches[local], n_walks);
    return out;
}

} // namespace ballwalk
