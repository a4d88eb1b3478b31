#include "gmc/kernels.hpp"

#include <cmath>

namespace gmc {

KernelDescriptor KernelDescriptor::l_exact(double L, int d) {
  if (d < 1) throw DomainError("KernelDescriptor: d >= 1 required");
  KernelDescriptor k;
  k.variant = Variant::LExact;
  k.L = L;
  k.d = d;
  return k;
}

KernelDescriptor KernelDescriptor::reference(int d) {
  if (d < 1) throw DomainError("KernelDescriptor: d >= 1 required");
  KernelDescriptor k;
  k.variant = Variant::Reference;
  k.d = d;
  k.domain_ball = Ball{Point{}, 1.0};
  k.domain_ball->center.dim = d;
  return k;
}

KernelDescriptor KernelDescriptor::composite(int d,
                                             std::function<double(const Point&, const Point&)> f,
                                             std::string f_name) {
  if (d < 1) throw DomainError("KernelDescriptor: d >= 1 required");
  KernelDescriptor k;
  k.variant = Variant::Composite;
  k.d = d;
  k.f = std::move(f);
  k.f_name = std::move(f_name);
  return k;
}

double KernelDescriptor::non_log_part(const Point& x, const Point& y) const {
  switch (variant) {
    case Variant::LExact:
      return L;
    case Variant::Reference:
      // Remark 1d: in d = 1 the reference construction is the exact field.
      if (d == 1) return 0.0;
      return -eval_Sd(d, sd_ratio_c(x, y));
    case Variant::Composite:
      return f(x, y);
  }
  return 0.0;
}

std::string KernelDescriptor::id() const {
  switch (variant) {
    case Variant::LExact:
      return "l_exact(L=" + std::to_string(L) + ",d=" + std::to_string(d) + ")";
    case Variant::Reference:
      return "reference(d=" + std::to_string(d) + ")";
    case Variant::Composite:
      return "composite(" + f_name + ",d=" + std::to_string(d) + ")";
  }
  return "?";
}

namespace {

// |S^{d-2}| / (2 |S^{d-1}|) = Gamma(d/2) / (2 sqrt(pi) Gamma((d-1)/2))
double sd_prefactor(int d) {
  return std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1))) /
         (2.0 * std::sqrt(M_PI));
}

double inner_integrate(const std::function<double(double)>& f, double a, double b,
                       const QuadratureConfig& quad) {
  if (quad.method == QuadratureConfig::Method::CompositeSimpson)
    return integrate_simpson(f, a, b, quad.panels);
  return integrate_adaptive_gl(f, a, b, quad.tolerance, quad.max_depth);
}

}  // namespace

double eval_Sd(int d, double c, const QuadratureConfig& quad) {
  quad.validate();
  if (d < 2) throw DomainError("eval_Sd: d >= 2 required (d = 1 bypasses S_d)");
  if (c < 0.0 || c > 1.0) throw DomainError("eval_Sd: c in [0,1] required");
  if (c == 0.0) return 0.0;  // integrand is log|1| = 0

  const auto integrand = [d, c](double theta) {
    const double s = std::sin(theta);
    const double w = (d == 2) ? 1.0 : ((d == 3) ? s : std::pow(s, d - 2));
    // 1 - 2c cos(t) + c^2 written without cancellation near (c, t) = (1, 0).
    const double sh = std::sin(0.5 * theta);
    const double q = (1.0 - c) * (1.0 - c) + 4.0 * c * sh * sh;
    return w * std::log(q);
  };

  double integral = 0.0;
  const double theta0 = 0.5;
  const bool singular_corner = c > 0.99;
  if (singular_corner && quad.endpoint_substitution) {
    // theta = exp(-s): integrable log singularity at theta -> 0 becomes a
    // smooth exponentially damped tail.
    const auto sub = [&integrand](double s) {
      const double theta = std::exp(-s);
      return integrand(theta) * theta;
    };
    const double s0 = -std::log(theta0);
    integral += inner_integrate(sub, s0, s0 + 46.0, quad);
    integral += inner_integrate(integrand, theta0, M_PI, quad);
  } else {
    integral += inner_integrate(integrand, 0.0, theta0, quad);
    integral += inner_integrate(integrand, theta0, M_PI, quad);
  }
  return -sd_prefactor(d) * integral;
}

double eval_kernel(const KernelDescriptor& k, const Point& x, const Point& y,
                   const QuadratureConfig& quad) {
  const double r = dist(x, y);
  if (r == 0.0)
    throw SingularityError("eval_kernel: x == y (use the CovMatrix diagonal convention)");
  if (!k.in_domain(x) || !k.in_domain(y))
    throw DomainError("eval_kernel: point outside kernel domain");
  switch (k.variant) {
    case KernelDescriptor::Variant::LExact:
      return -std::log(r) + k.L;
    case KernelDescriptor::Variant::Reference: {
      if (k.d == 1) return -std::log(r);
      return -std::log(r) - eval_Sd(k.d, sd_ratio_c(x, y), quad);
    }
    case KernelDescriptor::Variant::Composite:
      return -std::log(r) + k.f(x, y);
  }
  return 0.0;
}

double eval_ybar_cov(int d, double L, const Point& x, const Point& y,
                     const QuadratureConfig& quad) {
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw SingularityError("eval_ybar_cov: point at origin");
  return -std::log(std::max(nx, ny)) + L + eval_Sd(d, sd_ratio_c(x, y), quad);
}

double eval_yhat_cov(int d, const Point& x, const Point& y, const QuadratureConfig& quad) {
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw SingularityError("eval_yhat_cov: point at origin");
  const double r = dist(x, y);
  if (r == 0.0) throw SingularityError("eval_yhat_cov: coincident points");
  return std::log(std::max(nx, ny) / r) - eval_Sd(d, sd_ratio_c(x, y), quad);
}

namespace {

CovMatrix repair_psd(std::vector<Point> points, double epsilon, Eigen::MatrixXd m) {
  const auto n = m.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw FactorizationError("eigendecomposition failed on covariance matrix");
  Eigen::VectorXd lam = es.eigenvalues();
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam[i] < 0.0) {
      clipped += -lam[i];
      lam[i] = 0.0;
    }
  }
  CovMatrix cov;
  cov.points = std::move(points);
  cov.epsilon = epsilon;
  cov.factor = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
  if (clipped > 0.0) {
    cov.entries = cov.factor * cov.factor.transpose();
    cov.entries = 0.5 * (cov.entries + cov.entries.transpose()).eval();
  } else {
    cov.entries = std::move(m);
  }
  cov.clipped_mass = clipped;
  cov.outside_psd_radius = clipped > 0.01 * cov.entries.trace();
  return cov;
}

}  // namespace

CovMatrix build_cov_matrix(const KernelDescriptor& k, std::vector<Point> points,
                           double epsilon, const QuadratureConfig& quad) {
  if (epsilon <= 0.0) throw DomainError("build_cov_matrix: epsilon > 0 required");
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw DomainError("build_cov_matrix: empty point set");
  (void)quad;
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = -std::log(epsilon) + k.non_log_part(points[i], points[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = dist(points[i], points[j]);
      if (r == 0.0) throw DomainError("build_cov_matrix: duplicate points");
      const double v = -std::log(std::max(r, epsilon)) + k.non_log_part(points[i], points[j]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return repair_psd(std::move(points), epsilon, std::move(m));
}

CovMatrix build_cov_matrix_fn(const std::function<double(const Point&, const Point&)>& cov,
                              std::vector<Point> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw DomainError("build_cov_matrix_fn: empty point set");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = cov(points[i], points[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = cov(points[i], points[j]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return repair_psd(std::move(points), 0.0, std::move(m));
}

}  // namespace gmc
