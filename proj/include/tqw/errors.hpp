#pragma once

#include <stdexcept>
#include <string>

namespace tqw {

/// Input violates a physical precondition (non-unitary coin, sigma2 <= 0, odd lattice ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed quantity left its mathematically allowed range; indicates a bug upstream.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration document does not follow the published schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tqw
