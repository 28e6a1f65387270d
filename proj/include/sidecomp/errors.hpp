#pragma once

#include <stdexcept>
#include <string>

namespace sidecomp {

/// Malformed input: shape mismatch, missing fields, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A rank decision, idempotent lift or clustering step could not be made
/// reliably at the configured tolerances.
class NumericalDegeneracy : public std::runtime_error {
 public:
  explicit NumericalDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

/// A structural identity that must hold by construction was observed to fail.
class PropertyViolation : public std::runtime_error {
 public:
  explicit PropertyViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sidecomp
