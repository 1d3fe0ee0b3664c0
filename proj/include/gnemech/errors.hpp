// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gnemech {

/// Base of every error raised by the library. `kind()` is the stable,
/// machine-readable tag written into CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GNEMECH_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

GNEMECH_DEFINE_ERROR(CardinalityError);
GNEMECH_DEFINE_ERROR(AsymmetryError);
GNEMECH_DEFINE_ERROR(ParameterError);
GNEMECH_DEFINE_ERROR(DomainError);
GNEMECH_DEFINE_ERROR(DegenerateTrustError);
GNEMECH_DEFINE_ERROR(VariantError);
GNEMECH_DEFINE_ERROR(InfeasibleAllocationError);
GNEMECH_DEFINE_ERROR(ScaleError);
GNEMECH_DEFINE_ERROR(ConstructionError);
GNEMECH_DEFINE_ERROR(PreconditionError);
GNEMECH_DEFINE_ERROR(IOError);

#undef GNEMECH_DEFINE_ERROR

/// Raised when an iterative solver exhausts its budget. Carries the final
/// residual so callers can decide whether the iterate is still usable.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error("NonConvergenceError", what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace gnemech
