#include "ballwalk/oracle.hpp"

#include "ballwalk/error.hpp"
#include "ballwalk/format.hpp"
#include "ballwalk/spec_syntax.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ballwalk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMinCircleSamples = 64;

} // namespace

double profile_function(std::size_t dim, double t) {
    if (!(t > 0.0)) throw InvalidArgument("profile function needs t > 0");
    if (dim == 2) return -std::log(t);
    double sign = dim > 2 ? 1.0 : -1.0;
    return sign * std::pow(t, 2.0 - static_cast<double>(dim));
}

HarmonicOracle HarmonicOracle::linear(Point a, double b) {
    if (!std::isfinite(b)) throw InvalidArgument("linear oracle offset must be finite");
    return HarmonicOracle(oracle::Linear{std::move(a), b});
}

HarmonicOracle HarmonicOracle::quadratic(std::size_t dim, std::vector<double> matrix) {
    if (dim < 1 || dim > kMaxDim || matrix.size() != dim * dim) {
        throw InvalidArgument("quadratic oracle needs a square matrix of dimension 1..16");
    }
    double trace = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        trace += matrix[i * dim + i];
        for (std::size_t j = 0; j < dim; ++j) {
            scale = std::max(scale, std::abs(matrix[i * dim + j]));
            if (std::abs(matrix[i * dim + j] - matrix[j * dim + i]) > 1e-12) {
                throw InvalidArgument("quadratic oracle matrix must be symmetric");
            }
        }
    }
    if (std::abs(trace) > 1e-12 * std::max(1.0, scale)) {
        throw InvalidArgument("quadratic oracle matrix must be trace-free (harmonic)");
    }
    return HarmonicOracle(oracle::HarmonicQuadratic{dim, std::move(matrix)});
}

HarmonicOracle HarmonicOracle::quadratic_diagonal(std::vector<double> diagonal) {
    const std::size_t n = diagonal.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = diagonal[i];
    return quadratic(n, std::move(m));
}

HarmonicOracle HarmonicOracle::fundamental(Point z0) { return HarmonicOracle(oracle::FundamentalSolution{std::move(z0)}); }

HarmonicOracle HarmonicOracle::poisson_disk(std::vector<double> values) {
    if (values.size() < kMinCircleSamples) throw InvalidArgument("Poisson disk oracle needs at least 64 samples");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidArgument("Poisson disk samples must be finite");
    return HarmonicOracle(oracle::PoissonDisk{std::move(values)});
}

std::size_t HarmonicOracle::dim() const noexcept {
    return std::visit(overloaded{
                          [](const oracle::Linear& o) { return o.a.dim(); },
                          [](const oracle::HarmonicQuadratic& o) { return o.dim; },
                          [](const oracle::FundamentalSolution& o) { return o.z0.dim(); },
                          [](const oracle::PoissonDisk&) { return std::size_t{2}; },
                      },
                      kind_);
}

double HarmonicOracle::eval(const Point& x) const {
    if (x.dim() != dim()) throw InvalidArgument("oracle eval: dimension mismatch");
    return std::visit(overloaded{
                          [&](const oracle::Linear& o) { return dot(o.a, x) + o.b; },
                          [&](const oracle::HarmonicQuadratic& o) {
                              double s = 0.0;
                              for (std::size_t i = 0; i < o.dim; ++i)
                                  for (std::size_t j = 0; j < o.dim; ++j) s += x[i] * o.matrix[i * o.dim + j] * x[j];
                              return s;
                          },
                          [&](const oracle::FundamentalSolution& o) {
                              double t = distance(x, o.z0);
                              if (t == 0.0) throw InvalidArgument("fundamental solution evaluated at its pole");
                              return profile_function(x.dim(), t);
                          },
                          [&](const oracle::PoissonDisk& o) { return poisson_disk_eval(o.values, x); },
                      },
                      kind_);
}

void HarmonicOracle::validate_for(const Domain& domain) const {
    if (domain.dim() != dim()) throw InvalidArgument("oracle and domain dimensions differ");
    if (const auto* f = std::get_if<oracle::FundamentalSolution>(&kind_)) {
        if (!(domain.signed_distance(f->z0) > 0.0)) {
            throw InvalidArgument("fundamental solution pole must lie outside the closed domain");
        }
    }
    if (std::holds_alternative<oracle::PoissonDisk>(kind_)) {
        if (const auto* b = std::get_if<shape::Ball>(&domain.shape())) {
            if (norm(b->center) + b->radius > 1.0 + 1e-12) {
                throw InvalidArgument("Poisson disk oracle only covers the unit disk");
            }
        }
    }
}

std::string HarmonicOracle::to_spec() const {
    using detail::format_double;
    return std::visit(overloaded{
                          [](const oracle::Linear& o) { return "linear(" + to_string(o.a) + ";" + format_double(o.b) + ")"; },
                          [](const oracle::HarmonicQuadratic& o) {
                              std::string out = "quad(";
                              for (std::size_t i = 0; i < o.dim; ++i) {
                                  if (i) out += ";";
                                  for (std::size_t j = 0; j < o.dim; ++j) {
                                      if (j) out += ",";
                                      out += format_double(o.matrix[i * o.dim + j]);
                                  }
                              }
                              return out + ")";
                          },
                          [](const oracle::FundamentalSolution& o) { return "fundamental(" + to_string(o.z0) + ")"; },
                          [this](const oracle::PoissonDisk& o) {
                              return "poisson(" + (label_.empty() ? std::to_string(o.values.size()) + "-samples" : label_) + ")";
                          },
                      },
                      kind_);
}

double poisson_disk_eval(std::span<const double> values, const Point& x) {
    if (x.dim() != 2) throw InvalidArgument("Poisson disk quadrature is two-dimensional");
    if (values.size() < kMinCircleSamples) throw InvalidArgument("Poisson disk quadrature needs at least 64 samples");
    double r2 = dot(x, x);
    if (!(std::sqrt(r2) < 1.0 - 1e-6)) throw InvalidArgument("Poisson kernel is near-singular for |x| >= 1 - 1e-6");
    const std::size_t m = values.size();
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        double dx = x[0] - std::cos(theta);
        double dy = x[1] - std::sin(theta);
        sum += values[k] * (1.0 - r2) / (dx * dx + dy * dy);
    }
    return sum / static_cast<double>(m);
}

double laplacian_of(const HarmonicOracle& oracle, const Point& x) {
    if (x.dim() != oracle.dim()) throw InvalidArgument("laplacian_of: dimension mismatch");
    return 0.0;
}

double test_function_value(TestFunction f, const Point& x) {
    switch (f) {
    case TestFunction::SquaredNorm: return dot(x, x);
    case TestFunction::FirstCoordinateQuartic: return x[0] * x[0] * x[0] * x[0];
    case TestFunction::FirstCoordinate: return x[0];
    }
    return 0.0;
}

double laplacian_of(TestFunction f, const Point& x) {
    switch (f) {
    case TestFunction::SquaredNorm: return 2.0 * static_cast<double>(x.dim());
    case TestFunction::FirstCoordinateQuartic: return 12.0 * x[0] * x[0];
    case TestFunction::FirstCoordinate: return 0.0;
    }
    return 0.0;
}

std::vector<double> load_circle_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open boundary samples '" + path + "'");
    std::vector<double> angles, values;
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
                continue; // header
            }
            throw;
        }
        first = false;
        if (nums.size() == 1) {
            values.push_back(nums[0]);
        } else if (nums.size() == 2) {
            angles.push_back(nums[0]);
            values.push_back(nums[1]);
        } else {
            throw ParseError("boundary samples: expected 'value' or 'theta,value' per line");
        }
    }
    if (!angles.empty()) {
        if (angles.size() != values.size()) throw ParseError("boundary samples: mixed column counts");
        for (std::size_t k = 0; k < angles.size(); ++k) {
            double expect = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(angles.size());
            if (std::abs(angles[k] - expect) > 1e-9) throw ParseError("boundary samples must be equispaced from 0");
        }
    }
    return values;
}

HarmonicOracle parse_oracle(std::string_view text) {
    auto call = spec::parse_call(text);
    if (call.name == "linear") {
        auto groups = spec::parse_groups(call.args);
        if (groups.size() != 2 || groups[1].size() != 1) throw ParseError("linear(a1,...,aN;b) expected");
        return HarmonicOracle::linear(Point(groups[0]), groups[1][0]);
    }
    if (call.name == "quad") {
        auto groups = spec::parse_groups(call.args);
        if (groups.size() == 1) return HarmonicOracle::quadratic_diagonal(groups[0]);
        std::vector<double> m;
        for (const auto& row : groups) {
            if (row.size() != groups.size()) throw ParseError("quad(row;row;...) must be square");
            m.insert(m.end(), row.begin(), row.end());
        }
        return HarmonicOracle::quadratic(groups.size(), std::move(m));
    }
    if (call.name == "fundamental") return HarmonicOracle::fundamental(Point(spec::parse_numbers(call.args)));
    if (call.name == "poisson") {
        auto o = HarmonicOracle::poisson_disk(load_circle_samples(call.args));
        o.set_source_label(call.args);
        return o;
    }
    throw ParseError("unknown oracle '" + call.name + "'");
}

} // namespace ballwalk
