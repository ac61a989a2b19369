#pragma once

#include <stdexcept>
#include <string>

namespace gdps {

// Invalid numeric parameter (variance <= 0, beta outside (0,1), ...).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Shape or length mismatch between images, operators and measurements.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Operator cannot be handled by the requested sampling path.
class UnsupportedOperatorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Factorization failure, non-finite values, and similar.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable, unwritable or corrupt files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace gdps
