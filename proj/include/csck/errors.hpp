#pragma once

#include <stdexcept>
#include <string>

namespace csck {

/// Malformed or out-of-schema input (configs, serialized objects). CLI exit code 2.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Input is well-formed but outside the supported scope of a computation
/// (e.g. a non-Fano tuple passed to an anticanonical-only evaluator). CLI exit code 3.
struct ScopeError : std::runtime_error {
  explicit ScopeError(const std::string& what) : std::runtime_error(what) {}
};

/// Mathematical precondition violated at runtime (degenerate polytope,
/// loss of metric positivity, NaN in quadrature samples, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// The section space of the k-th twisted power is empty.
struct TwistInfeasibleError : DomainError {
  explicit TwistInfeasibleError(const std::string& what) : DomainError(what) {}
};

}  // namespace csck
