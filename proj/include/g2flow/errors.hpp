#pragma once

#include <stdexcept>
#include <string>

namespace g2flow {

/// A bilinear form or 3-form that was required to be positive definite is not.
struct PositivityError : std::runtime_error {
  explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

/// Hitchin endomorphism K^2 is not a negative multiple of the identity.
struct StabilityError : std::runtime_error {
  explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// (omega, Omega_+) do not induce a positive-definite metric or fail the
/// SU(3) normalizations.
struct CompatibilityError : std::runtime_error {
  explicit CompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

/// (dphi, dpsi) cannot be reassembled from torsion forms within tolerance.
struct InconsistentTorsionError : std::runtime_error {
  explicit InconsistentTorsionError(const std::string& what) : std::runtime_error(what) {}
};

/// Time integration failed (step size underflow while preserving invariants).
struct IntegrationError : std::runtime_error {
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the admissible domain (h <= 0, zero vector, bad shapes).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file / CLI usage problems. Carries enough context to print
/// line/field diagnostics.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace g2flow
