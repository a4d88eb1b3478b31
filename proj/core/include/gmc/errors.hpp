#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularityError : DomainError {
  using DomainError::DomainError;
};

struct RegimeError : DomainError {
  using DomainError::DomainError;
};

/// Adaptive quadrature gave up; carries the residual it could reach.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double residual_)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

/// A stopped simulation ran past its time budget; carries the probability
/// mass of the unfinished event.
struct TruncationError : std::runtime_error {
  TruncationError(const std::string& what, double probability_)
      : std::runtime_error(what), probability(probability_) {}
  double probability;
};

struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gmc
