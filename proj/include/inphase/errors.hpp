#pragma once

#include <stdexcept>
#include <string>

namespace inphase {

/// Bad arguments or malformed input data. Maps to CLI exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Factorization failure, non-finite intermediate, or similar. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal invariant was violated (e.g. a pixel no patch covers).
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace inphase
