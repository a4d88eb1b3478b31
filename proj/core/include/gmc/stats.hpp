#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gmc {

/// Fixed-shape pairwise-tree sum: reproducible to the bit regardless of
/// worker count, and far better conditioned than a running sum.
double pairwise_sum(std::span<const double> xs);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  int64_t n = 0;
};
MeanStderr mean_stderr(std::span<const double> xs);

double sample_variance(std::span<const double> xs);

/// Empirical quantile (linear interpolation) of an unsorted sample.
double quantile(std::vector<double> xs, double q);

double normal_cdf(double z);
double normal_quantile(double p);

/// chi(3) distribution function P(|N_3(0,I)| <= x).
double chi3_cdf(double x);

/// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
double expint_e1(double x);

struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};
WilsonInterval wilson_interval(int64_t successes, int64_t n, double z = 1.959963984540054);

/// Kolmogorov limiting tail Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

/// One-sample KS test against a cdf; returns the p-value with the usual
/// finite-n Stephens correction.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS against a cdf for a weighted sample (importance-weighted
/// ECDF, effective sample size in the statistic).
KsResult ks_test_weighted(std::vector<double> sample, std::vector<double> weights,
                          const std::function<double(double)>& cdf);

/// Anderson-Darling A^2 against a fully specified null; p-value from the
/// case-0 asymptotic law.
struct AdResult {
  double a2 = 0.0;
  double p_value = 1.0;
};
AdResult anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Weighted least squares of y on x; returns slope/intercept and their
/// standard errors.
struct LineFit {
  double slope = 0.0, intercept = 0.0;
  double slope_se = 0.0, intercept_se = 0.0;
};
LineFit wls_fit(std::span<const double> x, std::span<const double> y,
                std::span<const double> weight);

}  // namespace gmc
