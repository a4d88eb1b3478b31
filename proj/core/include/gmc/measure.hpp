#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gmc/field_sampler.hpp"
#include "gmc/geometry.hpp"
#include "gmc/quadrature.hpp"

namespace gmc {

/// One realization of a chaos mass int_A g dmu built from a field sample.
struct GmcMassSample {
  double value = 0.0;
  bool critical = true;
  std::optional<double> gamma;  // absent in the critical regime
  double epsilon = 0.0;
  double norm_factor = 1.0;  // (log 1/eps)^{1/2} at criticality, 1 otherwise
  uint64_t seed = 0;
  uint64_t replica = 0;
  std::shared_ptr<const SetSpec> set;
  std::shared_ptr<const DensitySpec> density;
};

/// Seneta-Heyde normalized critical mass:
///   (log 1/eps)^{1/2} sum_{x in A} g(x) exp(sqrt(2d) X(x) - d Var(x)) h^d.
GmcMassSample critical_mass(const FieldSample& fs, const SetSpec& A, const DensitySpec& g);

/// Subcritical mass, gamma^2 < 2d:
///   sum_{x in A} g(x) exp(gamma X(x) - gamma^2/2 Var(x)) h^d.
GmcMassSample subcritical_mass(const FieldSample& fs, double gamma, const SetSpec& A,
                               const DensitySpec& g);

/// Q = gamma/2 + d/gamma.
double q_parameter(double gamma, int d);

/// Closed-form subcritical tail constant, d in {1, 2}; tends to 1 as
/// gamma -> sqrt(2d).
double cbar_subcritical(double gamma, int d);

struct TailCoeff {
  double coefficient = 0.0;
  double exponent = 0.0;        // 2d / gamma^2
  double weight_integral = 0.0; // int_A e^{(2d/g)(Q-g) f(v,v)} g^{2d/g^2} dv
  double ratio_factor = 0.0;    // b/(b+1) with b = (2/g)(Q-g)
  double cbar = 0.0;
};

/// Leading subcritical tail coefficient and exponent for
/// P(int_A g dM_gamma > t) ~ coefficient / t^exponent.
TailCoeff subcritical_tail_coeff(double gamma, int d,
                                 const std::function<double(const Point&)>& f_diag,
                                 const DensitySpec& g, const SetSpec& A,
                                 const QuadratureConfig& quad = {});

/// Critical tail coefficient int_A g / sqrt(pi d).
double critical_tail_coeff(int d, const DensitySpec& g, const SetSpec& A,
                           const QuadratureConfig& quad = {});

/// Distributional comparison of M_gamma(A)/(sqrt(2d)-gamma) against
/// sqrt(2pi) mu(A) on the same field realizations.
struct DerivativeCheckReport {
  std::vector<double> quantile_levels;
  std::vector<double> quantile_ratios;  // subcritical-scaled / critical at each level
  double median_ratio = 0.0;
  bool large_discrepancy = false;
};
DerivativeCheckReport derivative_approx_check(const std::vector<FieldSample>& fields,
                                              double gamma, const SetSpec& A);

/// Numerical integral of fn over a SetSpec (boxes by tensor quadrature,
/// balls in polar form).
double integrate_over_set(const SetSpec& A, int d,
                          const std::function<double(const Point&)>& fn,
                          const QuadratureConfig& quad = {});

/// Pipeline helper: draw n replicas and reduce each directly to its mass
/// (memory stays O(grid x chunk), not O(grid x n)).
std::vector<double> sample_mass_batch(const FieldSampler& sampler, bool critical, double gamma,
                                      const SetSpec& A, const DensitySpec& g,
                                      const RngPolicy& rng, uint64_t first_replica, int n,
                                      int workers = 0);

}  // namespace gmc
