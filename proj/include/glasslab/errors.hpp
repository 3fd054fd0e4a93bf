#pragma once

#include <stdexcept>
#include <string>

namespace glasslab {

/// Invalid model, parameters, or request (bad site index, missing slot, ...).
class ConfigurationError : public std::runtime_error {
 public:
  explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

/// A resource cap was exceeded (enumeration size, quadrature dimension).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// A non-finite value appeared during evaluation.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace glasslab
