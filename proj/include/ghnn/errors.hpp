#pragma once

#include <stdexcept>
#include <string>

namespace ghnn {

/// Argument outside the domain of a function (e.g. t <= 0 for a power-law scale).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computed quantity became non-finite.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Vector/matrix sizes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid solver / sweep configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ghnn
