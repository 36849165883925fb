#include "cli.hpp"

#include "ballwalk/analysis.hpp"
#include "ballwalk/estimator.hpp"
#include "ballwalk/format.hpp"
#include "ballwalk/spec_syntax.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

namespace ballwalk::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 9> kCommands{{
    {Command::Solve, "solve"},
    {Command::Field, "field"},
    {Command::ExitDist, "exitdist"},
    {Command::Regularity, "regularity"},
    {Command::Escape, "escape"},
    {Command::Cone, "cone"},
    {Command::CheckMvp, "check-mvp"},
    {Command::CheckAvg, "check-avg"},
    {Command::Irregularity, "irregularity"},
}};

enum class KeyKind { Real, Count, Text, Reals, Flag };

struct KeySpec {
    std::string_view name;
    KeyKind kind;
    std::string_view help;
};

// Order here is the order of emitted configs.
constexpr std::array<KeySpec, 32> kKeys{{
    {"command", KeyKind::Text, "subcommand"},
    {"domain", KeyKind::Text, "domain spec, e.g. ball(0,0;1)"},
    {"data", KeyKind::Text, "boundary data or oracle spec"},
    {"eps", KeyKind::Real, "step cap epsilon in (0,1)"},
    {"stop", KeyKind::Real, "stop tolerance (default 1e-4 * diameter)"},
    {"max_steps", KeyKind::Count, "step cap per walk"},
    {"walks", KeyKind::Count, "walks (or samples) per estimate"},
    {"seed", KeyKind::Count, "master seed (fallback: BALLWALK_SEED)"},
    {"threads", KeyKind::Count, "worker threads"},
    {"out", KeyKind::Text, "report path (default stdout)"},
    {"format", KeyKind::Text, "csv or json"},
    {"svg", KeyKind::Flag, "field: also write <out stem>.svg"},
    {"trace", KeyKind::Text, "solve: write walk 0 as step,x1..xN CSV"},
    {"walk", KeyKind::Text, "ball or sphere"},
    {"x0", KeyKind::Reals, "start point"},
    {"y0", KeyKind::Reals, "boundary point"},
    {"lo", KeyKind::Reals, "field grid lower corner"},
    {"hi", KeyKind::Reals, "field grid upper corner"},
    {"resolution", KeyKind::Count, "field grid points per axis"},
    {"r", KeyKind::Real, "exitdist: exit radius"},
    {"delta", KeyKind::Real, "regularity/escape radius"},
    {"delta_hat", KeyKind::Real, "regularity probe radius"},
    {"probes", KeyKind::Count, "regularity probe count"},
    {"pmin", KeyKind::Real, "regularity pass threshold"},
    {"dim", KeyKind::Count, "cone: dimension"},
    {"R", KeyKind::Real, "cone ratio R"},
    {"outer", KeyKind::Count, "check-mvp: outer sample points"},
    {"function", KeyKind::Text, "check-avg: sqnorm, x1 or x1^4"},
    {"epsilons", KeyKind::Reals, "irregularity: epsilon values"},
    {"distances", KeyKind::Reals, "irregularity: start distances"},
    {"threshold", KeyKind::Real, "z-score pass threshold"},
    {"config", KeyKind::Text, "JSON config file"},
}};

const KeySpec* find_key(std::string_view name) {
    for (const auto& k : kKeys)
        if (k.name == name && k.name != "config") return &k;
    return nullptr;
}

struct HelpRequested {
    std::string text;
};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

Command parse_command(std::string_view name) {
    for (const auto& [c, n] : kCommands)
        if (n == name) return c;
    fail("unknown command '" + std::string(name) + "'");
}

double as_real(const Json& v, std::string_view key) {
    if (!v.is_number()) fail("key '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

std::uint64_t as_count(const Json& v, std::string_view key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    double d = v.is_number() ? v.get<double>() : -1.0;
    if (!(d >= 0.0 && d == std::floor(d) && d < 1.8e19)) {
        fail("key '" + std::string(key) + "' must be a nonnegative integer");
    }
    return static_cast<std::uint64_t>(d);
}

std::string as_text(const Json& v, std::string_view key) {
    if (!v.is_string()) fail("key '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> as_reals(const Json& v, std::string_view key) {
    if (!v.is_array()) fail("key '" + std::string(key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_real(e, key));
    return out;
}

// Flag text -> JSON value of the key's kind.
Json flag_value(const KeySpec& key, const std::string& text) {
    try {
        switch (key.kind) {
        case KeyKind::Real: return spec::parse_number(text);
        case KeyKind::Count: {
            // Exact for seeds above 2^53; "1e5" style falls through to reals.
            std::uint64_t v = 0;
            auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec == std::errc() && end == text.data() + text.size()) return v;
            return spec::parse_number(text);
        }
        case KeyKind::Reals: {
            Json arr = Json::array();
            for (double d : spec::parse_numbers(text)) arr.push_back(d);
            return arr;
        }
        case KeyKind::Text: return text;
        case KeyKind::Flag: return true;
        }
    } catch (const ParseError& e) {
        fail("key '" + std::string(key.name) + "': " + e.what());
    }
    return {};
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') { ++line; col = 1; }
        else ++col;
    }
    return {line, col};
}

Json parse_json_object(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        fail("config syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
    if (!j.is_object()) fail("config must be a JSON object");
    return j;
}

RunConfig from_json(const Json& j) {
    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        if (!find_key(key)) fail("unknown key '" + key + "'");
        if (key == "command") c.command = parse_command(as_text(v, key));
        else if (key == "domain") c.domain = as_text(v, key);
        else if (key == "data") c.data = as_text(v, key);
        else if (key == "eps") c.eps = as_real(v, key);
        else if (key == "stop") c.stop = as_real(v, key);
        else if (key == "max_steps") c.max_steps = as_count(v, key);
        else if (key == "walks") c.walks = as_count(v, key);
        else if (key == "seed") c.seed = as_count(v, key);
        else if (key == "threads") {
            auto t = as_count(v, key);
            if (t < 1 || t > 1024) fail("threads must be in [1,1024]");
            c.threads = static_cast<unsigned>(t);
        } else if (key == "out") c.out = as_text(v, key);
        else if (key == "format") {
            auto f = as_text(v, key);
            if (f == "csv") c.format = Format::Csv;
            else if (f == "json") c.format = Format::Json;
            else fail("format must be csv or json");
        } else if (key == "svg") {
            if (!v.is_boolean()) fail("key 'svg' must be a boolean");
            c.svg = v.get<bool>();
        } else if (key == "trace") c.trace = as_text(v, key);
        else if (key == "walk") c.walk = as_text(v, key);
        else if (key == "x0") c.x0 = as_reals(v, key);
        else if (key == "y0") c.y0 = as_reals(v, key);
        else if (key == "lo") c.lo = as_reals(v, key);
        else if (key == "hi") c.hi = as_reals(v, key);
        else if (key == "resolution") c.resolution = as_count(v, key);
        else if (key == "r") c.r = as_real(v, key);
        else if (key == "delta") c.delta = as_real(v, key);
        else if (key == "delta_hat") c.delta_hat = as_real(v, key);
        else if (key == "probes") c.probes = as_count(v, key);
        else if (key == "pmin") c.pmin = as_real(v, key);
        else if (key == "dim") c.dim = as_count(v, key);
        else if (key == "R") c.R = as_real(v, key);
        else if (key == "outer") c.outer = as_count(v, key);
        else if (key == "function") c.function = as_text(v, key);
        else if (key == "epsilons") c.epsilons = as_reals(v, key);
        else if (key == "distances") c.distances = as_reals(v, key);
        else if (key == "threshold") c.threshold = as_real(v, key);
    }
    return c;
}

void require(bool present, std::string_view key, Command c) {
    if (!present) {
        fail("missing required key '" + std::string(key) + "' for command " + std::string(command_name(c)));
    }
}

void range(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

bool uses_walks(Command c) { return c != Command::Cone && c != Command::CheckAvg; }

void validate(const RunConfig& c) {
    const Command cmd = c.command;
    const bool stochastic = cmd != Command::Cone;
    if (stochastic) require(c.seed.has_value(), "seed", cmd);
    if (uses_walks(cmd) || cmd == Command::CheckAvg) {
        if (cmd != Command::Irregularity || c.epsilons.empty()) require(c.eps.has_value(), "eps", cmd);
        if (cmd != Command::CheckAvg) require(!c.domain.empty(), "domain", cmd);
    }
    if (c.eps) range(*c.eps > 0.0 && *c.eps < 1.0, "eps must be in (0,1)");
    for (double e : c.epsilons) range(e > 0.0 && e < 1.0, "epsilons must be in (0,1)");
    if (c.stop) {
        range(*c.stop > 0.0, "stop must be positive");
        if (c.eps) range(*c.stop < *c.eps, "stop must be smaller than eps");
        for (double e : c.epsilons) range(*c.stop < e, "stop must be smaller than every epsilon");
    }
    range(c.max_steps >= 1, "max_steps must be at least 1");
    range(c.walks >= 2, "walks must be at least 2");
    range(c.walk == "ball" || c.walk == "sphere", "walk must be ball or sphere");
    range(c.threshold > 0.0, "threshold must be positive");

    switch (cmd) {
    case Command::Solve:
        require(!c.data.empty(), "data", cmd);
        require(!c.x0.empty(), "x0", cmd);
        break;
    case Command::Field:
        require(!c.data.empty(), "data", cmd);
        require(!c.lo.empty(), "lo", cmd);
        require(!c.hi.empty(), "hi", cmd);
        range(c.lo.size() == c.hi.size(), "lo and hi must have the same length");
        for (std::size_t i = 0; i < c.lo.size(); ++i) range(c.lo[i] < c.hi[i], "lo must be below hi on every axis");
        range(c.resolution >= 2 && c.resolution <= 4096, "resolution must be in [2,4096]");
        break;
    case Command::ExitDist:
        require(!c.x0.empty(), "x0", cmd);
        require(c.r.has_value(), "r", cmd);
        range(*c.r > 0.0, "r must be positive");
        break;
    case Command::Regularity:
        require(!c.y0.empty(), "y0", cmd);
        require(c.delta.has_value(), "delta", cmd);
        require(c.delta_hat.has_value(), "delta_hat", cmd);
        range(*c.delta > 0.0, "delta must be positive");
        range(*c.delta_hat > 0.0 && *c.delta_hat <= *c.delta, "delta_hat must be in (0,delta]");
        range(c.probes >= 1, "probes must be at least 1");
        range(c.pmin >= 0.0 && c.pmin <= 1.0, "pmin must be in [0,1]");
        break;
    case Command::Escape:
        require(!c.y0.empty(), "y0", cmd);
        require(!c.x0.empty(), "x0", cmd);
        require(c.delta.has_value(), "delta", cmd);
        range(*c.delta > 0.0, "delta must be positive");
        if (c.R) range(*c.R > 0.0, "R must be positive");
        break;
    case Command::Cone:
        require(c.dim.has_value(), "dim", cmd);
        require(c.R.has_value(), "R", cmd);
        range(*c.dim >= 1 && *c.dim <= 16, "dim must be in [1,16]");
        range(*c.R > 0.0, "R must be positive");
        break;
    case Command::CheckMvp:
        require(!c.data.empty(), "data", cmd);
        require(!c.x0.empty(), "x0", cmd);
        range(c.outer >= 2, "outer must be at least 2");
        break;
    case Command::CheckAvg:
        require(!c.x0.empty(), "x0", cmd);
        range(c.function == "sqnorm" || c.function == "x1" || c.function == "x1^4",
              "function must be sqnorm, x1 or x1^4");
        break;
    case Command::Irregularity:
        require(!c.y0.empty(), "y0", cmd);
        require(!c.distances.empty(), "distances", cmd);
        for (double d : c.distances) range(d > 0.0, "distances must be positive");
        break;
    }
    range(!c.svg || cmd == Command::Field, "svg is only available for field");
    range(!c.svg || !c.out.empty(), "svg needs out to name the image");
    range(c.trace.empty() || cmd == Command::Solve, "trace is only available for solve");
}

Json to_json(const RunConfig& c, bool for_report) {
    Json j;
    auto reals = [](const std::vector<double>& v) {
        Json a = Json::array();
        for (double d : v) a.push_back(d);
        return a;
    };
    j["command"] = std::string(command_name(c.command));
    if (!c.domain.empty()) j["domain"] = c.domain;
    if (!c.data.empty()) j["data"] = c.data;
    if (c.eps) j["eps"] = *c.eps;
    if (c.stop) j["stop"] = *c.stop;
    j["max_steps"] = c.max_steps;
    j["walks"] = c.walks;
    if (c.seed) j["seed"] = *c.seed;
    // Scheduling and output paths do not change the numbers; keep them out of
    // reports so reports are byte-identical across thread counts and paths.
    if (!for_report) j["threads"] = c.threads;
    if (!for_report && !c.out.empty()) j["out"] = c.out;
    j["format"] = c.format == Format::Csv ? "csv" : "json";
    j["svg"] = c.svg;
    if (!for_report && !c.trace.empty()) j["trace"] = c.trace;
    j["walk"] = c.walk;
    if (!c.x0.empty()) j["x0"] = reals(c.x0);
    if (!c.y0.empty()) j["y0"] = reals(c.y0);
    if (!c.lo.empty()) j["lo"] = reals(c.lo);
    if (!c.hi.empty()) j["hi"] = reals(c.hi);
    j["resolution"] = c.resolution;
    if (c.r) j["r"] = *c.r;
    if (c.delta) j["delta"] = *c.delta;
    if (c.delta_hat) j["delta_hat"] = *c.delta_hat;
    j["probes"] = c.probes;
    j["pmin"] = c.pmin;
    if (c.dim) j["dim"] = *c.dim;
    if (c.R) j["R"] = *c.R;
    j["outer"] = c.outer;
    j["function"] = c.function;
    if (!c.epsilons.empty()) j["epsilons"] = reals(c.epsilons);
    if (!c.distances.empty()) j["distances"] = reals(c.distances);
    j["threshold"] = c.threshold;
    return j;
}

// ---------------------------------------------------------------------------
// reports

using Cell = std::variant<double, std::uint64_t, std::string>;

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::optional<bool> pass;
    std::string note;
};

std::string csv_cell(const Cell& c) {
    return std::visit([](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return detail::format_double(v);
        else if constexpr (std::is_same_v<T, std::uint64_t>) return std::to_string(v);
        else return v;
    }, c);
}

void write_report(const RunConfig& config, const Report& report, std::ostream& os) {
    const Json cfg = to_json(config, true);
    if (config.format == Format::Csv) {
        os << "# config: " << cfg.dump() << "\n";
        for (std::size_t i = 0; i < report.columns.size(); ++i) os << (i ? "," : "") << report.columns[i];
        os << "\n";
        for (const auto& row : report.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << "\n";
        }
        if (report.pass) os << "# result: " << (*report.pass ? "PASS" : "FAIL") << "\n";
        if (!report.note.empty()) os << "# note: " << report.note << "\n";
        return;
    }
    Json j;
    j["config"] = cfg;
    Json rows = Json::array();
    for (const auto& row : report.rows) {
        Json r;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit([&](const auto& v) { r[report.columns[i]] = v; }, row[i]);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (report.pass) j["pass"] = *report.pass;
    if (!report.note.empty()) j["note"] = report.note;
    os << j.dump(2) << "\n";
}

std::vector<std::string> coord_columns(std::string_view prefix, std::size_t n) {
    std::vector<std::string> cols;
    for (std::size_t i = 1; i <= n; ++i) cols.push_back(std::string(prefix) + std::to_string(i));
    return cols;
}

void append_point(std::vector<Cell>& row, const Point& p) {
    for (double v : p.coords()) row.emplace_back(v);
}

void append_estimate(std::vector<Cell>& row, const Estimate& e) {
    row.emplace_back(e.mean);
    row.emplace_back(e.std_error);
    row.emplace_back(e.n);
    row.emplace_back(e.truncated_count);
}

const std::vector<std::string> kEstimateColumns{"mean", "stderr", "n", "truncated"};

WalkConfig walk_config(const RunConfig& c, double eps) {
    WalkConfig w;
    w.epsilon = eps;
    w.stop_tolerance = c.stop;
    w.max_steps = c.max_steps;
    w.kind = c.walk == "sphere" ? WalkKind::Sphere : WalkKind::Ball;
    return w;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

// Affine map of the means onto a blue-to-red ramp; skipped points are gray.
void write_svg(const std::string& path, const std::vector<FieldEntry>& field, std::size_t res) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& e : field) {
        if (!e.interior) continue;
        lo = std::min(lo, e.estimate.mean);
        hi = std::max(hi, e.estimate.mean);
    }
    const int cell = 16;
    const int side = static_cast<int>(res) * cell;
    auto f = open_output(path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
      << "\" viewBox=\"0 0 " << side << " " << side << "\">\n";
    for (std::size_t k = 0; k < field.size(); ++k) {
        // Grid index k = i + res * j with i along x1 and j along x2; rows are
        // drawn top-down, so flip j.
        std::size_t i = k % res, j = k / res;
        int x = static_cast<int>(i) * cell, y = static_cast<int>(res - 1 - j) * cell;
        std::string fill = "#808080";
        if (field[k].interior) {
            double t = hi > lo ? (field[k].estimate.mean - lo) / (hi - lo) : 0.5;
            int red = static_cast<int>(std::lround(255.0 * t));
            int blue = 255 - red;
            char buf[8];
            std::snprintf(buf, sizeof buf, "#%02x00%02x", red, blue);
            fill = buf;
        }
        f << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << fill << "\"/>\n";
    }
    f << "</svg>\n";
}

// ---------------------------------------------------------------------------
// commands

Report run_solve(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    BoundaryData f = parse_boundary_data(c.data);
    Point x0(c.x0);
    WalkConfig wc = walk_config(c, *c.eps);
    Estimate e = estimate_value(domain, f, x0, wc, c.walks, *c.seed, par);
    if (!c.trace.empty()) {
        // Walk 0 of the estimate above.
        std::vector<Point> path;
        WalkOptions opts;
        opts.trace = &path;
        run_walk(domain, x0, wc.resolved(domain), derive_stream(*c.seed, walk_stream_index(0, 0)), opts);
        auto t = open_output(c.trace);
        t << "step";
        for (const auto& col : coord_columns("x", x0.dim())) t << "," << col;
        t << "\n";
        for (std::size_t s = 0; s < path.size(); ++s) {
            t << s;
            for (double v : path[s].coords()) t << "," << detail::format_double(v);
            t << "\n";
        }
    }
    Report r;
    r.columns = coord_columns("x", x0.dim());
    r.columns.insert(r.columns.end(), kEstimateColumns.begin(), kEstimateColumns.end());
    std::vector<Cell> row;
    append_point(row, x0);
    append_estimate(row, e);
    r.rows.push_back(std::move(row));
    return r;
}

Report run_field(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    BoundaryData f = parse_boundary_data(c.data);
    const std::size_t n = c.lo.size();
    if (n != domain.dim()) throw InvalidArgument("grid and domain dimensions differ");
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > 10'000'000 / c.resolution) throw InvalidArgument("field grid exceeds 10^7 points");
        total *= c.resolution;
    }
    std::vector<Point> grid;
    grid.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        Point p(n);
        std::size_t rem = k;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t idx = rem % c.resolution;
            rem /= c.resolution;
            p[i] = c.lo[i] + (c.hi[i] - c.lo[i]) * static_cast<double>(idx) / static_cast<double>(c.resolution - 1);
        }
        grid.push_back(p);
    }
    auto field = estimate_field(domain, f, grid, walk_config(c, *c.eps), c.walks, *c.seed, par);
    if (c.svg) {
        if (n != 2) throw InvalidArgument("svg heatmaps need a 2-D grid");
        std::string path = c.out;
        auto dot = path.find_last_of('.');
        auto slash = path.find_last_of('/');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) path.erase(dot);
        write_svg(path + ".svg", field, c.resolution);
    }
    Report r;
    r.columns = coord_columns("x", n);
    r.columns.insert(r.columns.end(), kEstimateColumns.begin(), kEstimateColumns.end());
    for (const auto& e : field) {
        if (!e.interior) continue;
        std::vector<Cell> row;
        append_point(row, e.point);
        append_estimate(row, e.estimate);
        r.rows.push_back(std::move(row));
    }
    return r;
}

// Rows of (quantity, value, stderr, expected, z) with a z-score check.
struct CheckTable {
    Report report{{"quantity", "value", "stderr", "expected", "z"}, {}, true, {}};
    double threshold;

    void add(std::string name, double value, double se, double expected) {
        double z = se > 0.0 ? std::abs(value - expected) / se : (value == expected ? 0.0 : INFINITY);
        if (!(z < threshold)) report.pass = false;
        report.rows.push_back({std::move(name), value, se, expected, z});
    }
    void add_bound(std::string name, double value, bool ok) {
        if (!ok) report.pass = false;
        report.rows.push_back({std::move(name), value, 0.0, 0.0, 0.0});
    }
};

Report run_exitdist(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    Point x0(c.x0);
    auto s = exit_measure_stats(domain, x0, *c.r, *c.eps, c.walks, *c.seed, par);
    const std::size_t n = x0.dim();
    CheckTable t{.threshold = c.threshold};
    for (std::size_t i = 0; i < n; ++i)
        t.add("mean_direction_" + std::to_string(i + 1), s.mean_direction[i], s.mean_direction_stderr[i], 0.0);
    for (std::size_t i = 0; i < n; ++i)
        t.add("covariance_" + std::to_string(i + 1) + std::to_string(i + 1), s.direction_covariance[i * n + i],
              s.covariance_diag_stderr[i], 1.0 / static_cast<double>(n));
    t.report.rows.push_back({std::string("overshoot_mean"), s.overshoot_mean, 0.0, 0.0, 0.0});
    t.add_bound("overshoot_min", s.overshoot_min, s.overshoot_min >= 0.0);
    t.add_bound("overshoot_max", s.overshoot_max, s.overshoot_max < *c.eps);
    return t.report;
}

Report run_regularity(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    auto rep = estimate_regularity(domain, Point(c.y0), *c.delta, *c.delta_hat, walk_config(c, *c.eps), c.probes,
                                   c.walks, *c.seed, par);
    Report r;
    r.columns = coord_columns("x", c.y0.size());
    r.columns.insert(r.columns.end(), {"probability", "stderr"});
    for (const auto& p : rep.probes) {
        std::vector<Cell> row;
        append_point(row, p.x0);
        row.emplace_back(p.probability);
        row.emplace_back(p.std_error);
        r.rows.push_back(std::move(row));
    }
    r.pass = rep.min_probability() >= c.pmin;
    // A finite probe set can only be consistent with regularity, never prove it.
    r.note = *r.pass ? "probes consistent with walk-regularity at y0"
                     : "probes inconsistent with walk-regularity at y0";
    return r;
}

Report run_escape(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    Point y0(c.y0);
    auto p = estimate_escape_probability(domain, y0, *c.delta, Point(c.x0), walk_config(c, *c.eps), c.walks,
                                         *c.seed, par);
    Report r{{"probability", "stderr", "n"}, {{p.p, p.std_error, p.n}}, std::nullopt, {}};
    if (c.R) {
        double theta0 = cone_bound_theta0(y0.dim(), *c.R);
        r.columns.push_back("theta0");
        r.rows[0].emplace_back(theta0);
        r.pass = p.p <= theta0 + c.threshold * p.std_error;
    }
    return r;
}

Report run_cone(const RunConfig& c) {
    double theta0 = cone_bound_theta0(*c.dim, *c.R);
    return Report{{"dim", "R", "theta0"}, {{*c.dim, *c.R, theta0}}, std::nullopt, {}};
}

Report run_check_mvp(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    BoundaryData f = parse_boundary_data(c.data);
    auto res = mean_value_residual(domain, f, Point(c.x0), walk_config(c, *c.eps), c.outer, c.walks, *c.seed, par);
    CheckTable t{.threshold = c.threshold};
    t.add("mean_value_residual", res.residual, res.std_error, 0.0);
    return t.report;
}

Report run_check_avg(const RunConfig& c, const Parallelism& par) {
    TestFunction fn = c.function == "sqnorm" ? TestFunction::SquaredNorm
                      : c.function == "x1"   ? TestFunction::FirstCoordinate
                                             : TestFunction::FirstCoordinateQuartic;
    Point x0(c.x0);
    const double eps = *c.eps;
    auto u = [fn](const Point& y) { return test_function_value(fn, y); };
    auto res = averaging_residual(u, laplacian_of(fn, x0), x0, eps, c.walks, *c.seed, par);
    // Polynomials of degree <= 3 average exactly; x1^4 leaves eps^4 E[w1^4].
    double expected = 0.0;
    if (fn == TestFunction::FirstCoordinateQuartic) {
        double n = static_cast<double>(x0.dim());
        expected = std::pow(eps, 4) * 3.0 / ((n + 2.0) * (n + 4.0));
    }
    CheckTable t{.threshold = c.threshold};
    t.add("averaging_residual", res.residual, res.std_error, expected);
    return t.report;
}

Report run_irregularity(const RunConfig& c, const Parallelism& par) {
    Domain domain = parse_domain(c.domain);
    std::vector<double> eps = c.epsilons.empty() ? std::vector<double>{*c.eps} : c.epsilons;
    auto rows = irregularity_witness(domain, Point(c.y0), eps, c.distances, walk_config(c, eps.front()), c.walks,
                                     *c.seed, par);
    Report r;
    r.columns = {"eps", "distance"};
    auto xs = coord_columns("x", c.y0.size());
    r.columns.insert(r.columns.end(), xs.begin(), xs.end());
    r.columns.insert(r.columns.end(), kEstimateColumns.begin(), kEstimateColumns.end());
    r.columns.push_back("boundary_value");
    for (const auto& w : rows) {
        std::vector<Cell> row{w.epsilon, w.start_distance};
        append_point(row, w.x0);
        append_estimate(row, w.estimate);
        row.emplace_back(w.boundary_value);
        r.rows.push_back(std::move(row));
    }
    return r;
}

} // namespace

std::string_view command_name(Command c) {
    for (const auto& [cmd, n] : kCommands)
        if (cmd == c) return n;
    return "?";
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig c = from_json(parse_json_object(text));
    validate(c);
    return c;
}

std::string emit_config(const RunConfig& config) { return to_json(config, false).dump(2) + "\n"; }

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Monte Carlo ball-walk Dirichlet solver", "ballwalk"};
    app.allow_windows_style_options(false);
    std::string command;
    app.add_option("command", command, "solve | field | exitdist | regularity | escape | cone | check-mvp | check-avg | irregularity")
        ->required();
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    for (const auto& k : kKeys) {
        std::string name{k.name};
        if (name == "command") continue;
        if (k.kind == KeyKind::Flag) opts[name] = app.add_flag("--" + name)->description(std::string(k.help));
        else opts[name] = app.add_option("--" + name, raw[name], std::string(k.help));
    }
    app.add_flag("--emit-config", "print the resolved config as JSON and exit");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    Json merged = Json::object();
    if (opts["config"]->count()) {
        std::ifstream f(raw["config"], std::ios::binary);
        if (!f) fail("cannot read config file '" + raw["config"] + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        merged = parse_json_object(ss.str());
    }
    merged["command"] = command;
    for (const auto& k : kKeys) {
        std::string name{k.name};
        if (name == "command" || name == "config" || !opts[name]->count()) continue;
        merged[name] = flag_value(k, raw[name]);
    }
    if (!merged.contains("seed")) {
        if (const char* env = std::getenv("BALLWALK_SEED")) {
            try {
                merged["seed"] = flag_value(*find_key("seed"), env);
            } catch (const ConfigError&) {
                fail("BALLWALK_SEED is not a number");
            }
        }
    }
    RunConfig c = from_json(merged);
    validate(c);
    return c;
}

int run(const RunConfig& c, std::ostream& out) {
    const Parallelism par{c.threads};
    Report r;
    switch (c.command) {
    case Command::Solve: r = run_solve(c, par); break;
    case Command::Field: r = run_field(c, par); break;
    case Command::ExitDist: r = run_exitdist(c, par); break;
    case Command::Regularity: r = run_regularity(c, par); break;
    case Command::Escape: r = run_escape(c, par); break;
    case Command::Cone: r = run_cone(c); break;
    case Command::CheckMvp: r = run_check_mvp(c, par); break;
    case Command::CheckAvg: r = run_check_avg(c, par); break;
    case Command::Irregularity: r = run_irregularity(c, par); break;
    }
    if (c.out.empty()) {
        write_report(c, r, out);
    } else {
        auto f = open_output(c.out);
        write_report(c, r, f);
    }
    return r.pass.value_or(true) ? kOk : kCheckFailed;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        bool emit = std::find(args.begin(), args.end(), "--emit-config") != args.end();
        RunConfig c = parse_args(args);
        if (emit) {
            out << emit_config(c);
            return kOk;
        }
        return run(c, out);
    } catch (const HelpRequested& h) {
        out << h.text;
        return kOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kOperationalError;
    }
}

} // namespace ballwalk::cli
