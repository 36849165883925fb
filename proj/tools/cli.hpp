#pragma once

#include "ballwalk/error.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ballwalk::cli {

enum class Command { Solve, Field, ExitDist, Regularity, Escape, Cone, CheckMvp, CheckAvg, Irregularity };
enum class Format { Csv, Json };

/// Everything needed to reproduce one run. Keys of the JSON config file are
/// the long flag names without the leading dashes.
struct RunConfig {
    Command command = Command::Solve;
    std::string domain;
    std::string data;
    std::optional<double> eps;
    std::optional<double> stop;
    std::uint64_t max_steps = 10'000'000;
    std::uint64_t walks = 10'000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;
    Format format = Format::Csv;
    bool svg = false;
    std::string trace;
    std::string walk = "ball";

    std::vector<double> x0;
    std::vector<double> y0;
    std::vector<double> lo;
    std::vector<double> hi;
    std::uint64_t resolution = 21;
    std::optional<double> r;
    std::optional<double> delta;
    std::optional<double> delta_hat;
    std::uint64_t probes = 8;
    double pmin = 0.95;
    std::optional<std::uint64_t> dim;
    std::optional<double> R;
    std::uint64_t outer = 50;
    std::string function = "sqnorm";
    std::vector<double> epsilons;
    std::vector<double> distances;
    double threshold = 4.0;

    bool operator==(const RunConfig&) const = default;
};

/// Bad configuration: unknown key, malformed JSON, missing or out-of-range value.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

std::string_view command_name(Command c);

/// argv without the program name: command [--key value ...] [--config file].
/// Flags override file values; BALLWALK_SEED fills a missing seed.
RunConfig parse_args(const std::vector<std::string>& args);

/// Parses a flat JSON object (the --config file format).
RunConfig parse_config_text(std::string_view text);

/// Full resolved config as JSON; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kOperationalError = 1;
inline constexpr int kCheckFailed = 2;

/// Runs a validated config, writing the report to `out` (or config.out).
int run(const RunConfig& config, std::ostream& out);

/// parse_args + run with error reporting; the body of main().
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ballwalk::cli
