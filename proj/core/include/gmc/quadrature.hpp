#pragma once

#include <functional>

#include "gmc/errors.hpp"

namespace gmc {

struct QuadratureConfig {
  enum class Method { AdaptiveGaussLegendre, CompositeSimpson };
  Method method = Method::AdaptiveGaussLegendre;
  double tolerance = 1e-12;
  int panels = 4096;  // composite Simpson only
  bool endpoint_substitution = true;
  int max_depth = 32;

  void validate() const {
    if (tolerance <= 0) throw DomainError("QuadratureConfig: tolerance > 0 required");
    if (panels < 2) throw DomainError("QuadratureConfig: panel count >= 2 required");
  }
};

/// Integrate f over [a, b] with the configured method. Adaptive failures
/// raise QuadratureError carrying the achieved residual.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& quad = {});

double integrate_adaptive_gl(const std::function<double(double)>& f, double a, double b,
                             double tol, int max_depth);

double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         int panels);

}  // namespace gmc
