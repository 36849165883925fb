#include "ballwalk/error.hpp"
#include "ballwalk/geometry.hpp"
#include "ballwalk/spec_syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace ballwalk {

namespace spec {

Call parse_call(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    auto open = s.find('(');
    if (open == std::string::npos || open == 0 || s.back() != ')') {
        throw ParseError("expected name(...), got '" + std::string(text) + "'");
    }
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0 && i + 1 != s.size()) {
            throw ParseError("unexpected text after ')' in '" + std::string(text) + "'");
        }
        if (depth < 0) throw ParseError("unbalanced parentheses in '" + std::string(text) + "'");
    }
    if (depth != 0) throw ParseError("unbalanced parentheses in '" + std::string(text) + "'");
    Call call{s.substr(0, open), s.substr(open + 1, s.size() - open - 2)};
    std::transform(call.name.begin(), call.name.end(), call.name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return call;
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_number(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError("invalid number '" + std::string(text) + "'");
    }
    return v;
}

std::vector<double> parse_numbers(std::string_view text) {
    std::vector<double> out;
    for (const auto& part : split_top_level(text, ',')) out.push_back(parse_number(part));
    return out;
}

std::vector<std::vector<double>> parse_groups(std::string_view text) {
    std::vector<std::vector<double>> out;
    for (const auto& g : split_top_level(text, ';')) out.push_back(parse_numbers(g));
    return out;
}

} // namespace spec

Domain parse_domain(std::string_view text) {
    auto call = spec::parse_call(text);
    const auto& name = call.name;
    if (name == "diff" || name == "difference") {
        auto parts = spec::split_top_level(call.args, ',');
        if (parts.size() != 2) throw ParseError("diff(A,B) takes exactly two domains");
        return Domain::difference(parse_domain(parts[0]), parse_domain(parts[1]));
    }

    auto groups = spec::parse_groups(call.args);
    auto expect = [&](std::size_t n_groups) {
        if (groups.size() != n_groups) {
            throw ParseError(name + "(...) expects " + std::to_string(n_groups) + " ';'-separated groups");
        }
    };
    auto scalar = [&](std::size_t g) {
        if (groups[g].size() != 1) throw ParseError(name + "(...): expected a single radius");
        return groups[g][0];
    };

    if (name == "ball") {
        expect(2);
        return Domain::ball(Point(groups[0]), scalar(1));
    }
    if (name == "punctured_ball") {
        expect(2);
        return Domain::punctured_ball(Point(groups[0]), scalar(1));
    }
    if (name == "box") {
        expect(2);
        return Domain::box(Point(groups[0]), Point(groups[1]));
    }
    if (name == "annulus") {
        expect(2);
        if (groups[1].size() != 2) throw ParseError("annulus(c;r_in,r_out) needs two radii");
        return Domain::annulus(Point(groups[0]), groups[1][0], groups[1][1]);
    }
    if (name == "halfspaces" || name == "polytope") {
        std::vector<std::pair<Point, double>> hs;
        for (const auto& g : groups) {
            if (g.size() < 2) throw ParseError("halfspace group needs a normal and an offset");
            hs.emplace_back(Point(std::span<const double>(g.data(), g.size() - 1)), g.back());
        }
        return Domain::halfspace_intersection(hs);
    }
    throw ParseError("unknown domain '" + name + "'");
}

} // namespace ballwalk
