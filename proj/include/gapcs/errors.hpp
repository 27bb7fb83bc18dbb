#pragma once

#include <stdexcept>
#include <string>

namespace gapcs {

/// Shape mismatch between an operator and a vector/matrix argument.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// AA^T is numerically singular; the solver's standing assumption fails.
struct SingularGram : std::runtime_error {
  explicit SingularGram(const std::string& what) : std::runtime_error(what) {}
};

/// Exact RIP enumeration would exceed the configured subset cap.
struct TooManySubsets : std::runtime_error {
  explicit TooManySubsets(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix expected to be orthonormal is not (beyond tolerance).
struct NotOrthonormal : std::runtime_error {
  explicit NotOrthonormal(const std::string& what) : std::runtime_error(what) {}
};

/// Scalar argument outside the domain of a formula or generator.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file (CSV, PGM, binary matrix).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gapcs
