#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gmc/fusion_toy.hpp"  // LawSpec
#include "gmc/quadrature.hpp"
#include "gmc/stats.hpp"

namespace gmc {

/// Empirical survival function on a t grid with Wilson intervals.
struct TailScan {
  std::vector<double> t;
  std::vector<double> p_hat;
  std::vector<double> ci_lo, ci_hi;
  std::vector<double> t_p;  // derived column t * p_hat
  std::vector<int64_t> count;
  int64_t n = 0;
};

TailScan estimate_tail(std::span<const double> values, const std::vector<double>& t_grid);

/// Fitted leading coefficient of c / t^q.
struct CoefficientFit {
  double c_hat = 0.0;
  double stderr_ = 0.0;
  double t_lo = 0.0, t_hi = 0.0;  // selected window
  double exponent = 1.0;
  bool exponent_fixed = true;
  double slope_se = 0.0;
  double flatness = 0.0;  // max/min of t^q p_hat over the window
  size_t points_used = 0;
};

/// Fixed exponent: plateau average of t^q p_hat over the widest window with
/// every bin count >= 10 and flatness <= 1.5. Free: weighted least squares
/// of log p_hat on log t over the count-eligible points.
CoefficientFit fit_power_law(const TailScan& scan, std::optional<double> fixed_exponent);

struct LaplaceScan {
  enum class Tag { Sq, Log };
  Tag tag = Tag::Sq;
  std::vector<double> lambda;
  std::vector<double> estimate;
  std::vector<double> stderr_;
  int64_t n = 0;
};

/// lambda^{-1/2} E[1 - e^{-lambda U^2}]; for critical masses the lambda->0
/// limit is d^{-1/2} int g.
LaplaceScan laplace_sq(std::span<const double> values, const std::vector<double>& lambda_grid);

/// E[U e^{-lambda U}] / (-log lambda), 0 < lambda < 1.
LaplaceScan laplace_log(std::span<const double> values, const std::vector<double>& lambda_grid);

/// Deterministic study of the survival law P(U>t) = (1 + a sin log t)/t,
/// t >= 1: the Laplace functional ratio tends to 1 while t P(U>t)
/// oscillates in [1-a, 1+a] forever.
struct TauberianReport {
  double a = 0.0;
  std::vector<double> lambda;
  std::vector<double> e_val;            // quadrature E[U e^{-lambda U}]
  std::vector<double> ratio_neg_log;    // e_val / (-log lambda)
  std::vector<double> ratio_oracle;     // e_val / (-log lambda - gamma_E)
  std::vector<double> t;
  std::vector<double> t_survival;       // t * P(U > t)
  double oscillation_amplitude = 0.0;   // analytic sup_t |t P - 1| = |a|
  double band_lo = 0.0, band_hi = 0.0;  // observed min/max of t * P on the grid
};

TauberianReport tauberian_counterexample(double a, const std::vector<double>& lambda_grid,
                                         const std::vector<double>& t_grid,
                                         const QuadratureConfig& quad = {});

/// Synthetic exact-power-law factor: P(U > t) = c t^{-q} for t >= c^{1/q}.
struct SyntheticPareto {
  double c = 1.0;
  double q = 1.0;
  double draw(RngStream& rng) const;
  double survival(double t) const;
};

/// MC check of the product-tail law P(UV > t) ~ c E[V^q] t^{-q}.
struct ProductTailReport {
  std::vector<double> t;
  std::vector<double> p_hat, ci_lo, ci_hi;
  std::vector<double> predicted;  // c E[V^q] / t^q
  double e_v_q = 0.0;             // quadrature moment of V
  bool upper_bound_holds = true;  // Wilson lower bounds below predicted at all t
};

ProductTailReport aux_product_tail(const SyntheticPareto& u_spec, const LawSpec& v_spec,
                                   double q, const std::vector<double>& t_grid, int n,
                                   const RngPolicy& rng, const QuadratureConfig& quad = {});

/// q-th moment of a LawSpec via quadrature (test oracles use closed forms).
double law_moment(const LawSpec& law, double q, const QuadratureConfig& quad = {});

/// Splitting diagnostics on paired masses mu(A), mu(A+), mu(A-) built from
/// shared realizations; residual and cross term both vanish as lambda -> 0.
struct SplittingReport {
  std::vector<double> lambda;
  std::vector<double> residual;  // lam^{-1/2}[E(1-e^{-l a^2}) - E(...p) - E(...m)]
  std::vector<double> cross;     // lam^{-1/2} E[1 - e^{-2 l p m}]
  std::vector<double> main_sum;  // lam^{-1/2}[E(...p) + E(...m)]
};

SplittingReport splitting_check(std::span<const double> whole, std::span<const double> plus,
                                std::span<const double> minus,
                                const std::vector<double>& lambda_grid);

/// MC estimate of E[mu(B1)^h mu(B2)^h] on paired replicas.
MeanStderr cross_moment_estimate(std::span<const double> b1, std::span<const double> b2,
                                 double h);

}  // namespace gmc
