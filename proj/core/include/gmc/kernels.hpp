#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gmc/geometry.hpp"
#include "gmc/quadrature.hpp"

namespace gmc {

/// Covariance specification for a log-correlated field
///   E[X(x)X(y)] = -log|x-y| + f(x,y).
/// Variants fix the non-log part f:
///   LExact     f = L                   (exact scaling field)
///   Reference  f = -S_d(x,y)           (spherically decomposable field)
///   Composite  f = user function, declared as f_plus - f_minus
struct KernelDescriptor {
  enum class Variant { LExact, Reference, Composite };

  Variant variant = Variant::LExact;
  double L = 0.0;
  int d = 1;
  std::function<double(const Point&, const Point&)> f;
  std::string f_name;  // registry id, used for serialization of Composite
  std::optional<Box> domain_box;
  std::optional<Ball> domain_ball;

  static KernelDescriptor l_exact(double L, int d);
  static KernelDescriptor reference(int d);
  static KernelDescriptor composite(int d, std::function<double(const Point&, const Point&)> f,
                                    std::string f_name = "custom");

  /// The non-log part f(x,y) of the covariance; finite at x == y.
  double non_log_part(const Point& x, const Point& y) const;

  bool in_domain(const Point& p) const {
    if (domain_box && !domain_box->contains(p)) return false;
    if (domain_ball && !domain_ball->contains(p)) return false;
    return true;
  }

  std::string id() const;
};

/// Spherical-average correction S_d entering the reference kernel:
///   S_d(c) = -(|S^{d-2}| / 2|S^{d-1}|) int_0^pi sin^{d-2}(t) log|1 - 2c cos t + c^2| dt
/// with c = (|x|/|y|) ^ (|y|/|x|).  Identically zero for d = 2; the log
/// singularity of the integrand at c = 1 is handled by the endpoint
/// substitution t = exp(-s).
double eval_Sd(int d, double c, const QuadratureConfig& quad = {});

inline double sd_ratio_c(const Point& x, const Point& y) {
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 && ny == 0.0) throw SingularityError("S_d undefined at (0,0)");
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return nx < ny ? nx / ny : ny / nx;
}

/// E[X(x)X(y)] for the kernel; x == y raises SingularityError (covariance
/// matrices use the regularized diagonal convention instead).
double eval_kernel(const KernelDescriptor& k, const Point& x, const Point& y,
                   const QuadratureConfig& quad = {});

/// Spherical-average covariance: -log(|x| v |y|) + L + S_d(x,y).
double eval_ybar_cov(int d, double L, const Point& x, const Point& y,
                     const QuadratureConfig& quad = {});

/// Lateral-field covariance: log((|x| v |y|)/|x-y|) - S_d(x,y); jointly
/// scale invariant.
double eval_yhat_cov(int d, const Point& x, const Point& y,
                     const QuadratureConfig& quad = {});

/// Regularized covariance matrix on a point set, entries
///   -log(|x_i - x_j| v eps) + f(x_i, x_j),
/// repaired to PSD by clipping negative eigenvalues at zero.
struct CovMatrix {
  std::vector<Point> points;
  double epsilon = 0.0;
  Eigen::MatrixXd entries;  // repaired, symmetric
  Eigen::MatrixXd factor;   // entries == factor * factor^T
  double clipped_mass = 0.0;
  bool outside_psd_radius = false;  // clipped_mass > 1% of trace

  Eigen::VectorXd variance() const { return entries.diagonal(); }
};

CovMatrix build_cov_matrix(const KernelDescriptor& k, std::vector<Point> points,
                           double epsilon, const QuadratureConfig& quad = {});

/// Same machinery for an arbitrary covariance function (no log part); used
/// for continuous Gaussian fields such as the smooth composite parts.
CovMatrix build_cov_matrix_fn(const std::function<double(const Point&, const Point&)>& cov,
                              std::vector<Point> points);

}  // namespace gmc
