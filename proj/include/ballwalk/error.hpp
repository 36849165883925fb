#pragma once

#include <stdexcept>
#include <string>

namespace ballwalk {

/// Invalid input: bad dimension, out-of-range parameter, exterior point.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A simulation could not produce a usable result (step cap, truncation budget).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed spec string or config text.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ballwalk
