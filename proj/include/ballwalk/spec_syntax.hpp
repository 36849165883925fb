#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ballwalk::spec {

/// `name(args)` with whitespace removed; args kept verbatim.
struct Call {
    std::string name;
    std::string args;
};

/// Parses `name(...)`; throws ParseError on unbalanced parentheses or trailing text.
Call parse_call(std::string_view text);

/// Splits on `sep` at parenthesis depth zero.
std::vector<std::string> split_top_level(std::string_view text, char sep);

/// Comma-separated finite reals.
std::vector<double> parse_numbers(std::string_view text);

double parse_number(std::string_view text);

/// Semicolon groups of comma-separated reals: "0,0;1" -> {{0,0},{1}}.
std::vector<std::vector<double>> parse_groups(std::string_view text);

} // namespace ballwalk::spec
