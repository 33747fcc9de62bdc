#pragma once

#include <stdexcept>
#include <string>

namespace ddsgps {

/// Malformed input: dimension mismatch, invalid config field, bad index.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The coupling constraint cannot be met inside the local boxes.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical invariant broke during a run (e.g. push-sum weight underflow).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddsgps
