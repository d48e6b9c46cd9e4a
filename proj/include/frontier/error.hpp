#pragma once

#include <stdexcept>
#include <string>

namespace frontier {

/// Malformed, missing or misaligned input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes that do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Not enough trailing history for a rolling estimate or warm-up.
class HistoryError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Non-finite values, degenerate baselines, exploding updates.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace frontier
