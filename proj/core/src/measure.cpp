#include "gmc/measure.hpp"

#include <algorithm>
#include <cmath>

#include "gmc/parallel.hpp"
#include "gmc/stats.hpp"

namespace gmc {

namespace {

struct MassWeights {
  std::vector<Eigen::Index> idx;  // grid points inside A (cell-center rule)
  std::vector<double> gw;         // g(x) * h^d
};

MassWeights mass_weights(const GridSpec& grid, const SetSpec& A, const DensitySpec& g) {
  MassWeights w;
  const double vol = grid.cell_volume();
  for (size_t i = 0; i < grid.points.size(); ++i) {
    if (A.contains(grid.points[i])) {
      w.idx.push_back(static_cast<Eigen::Index>(i));
      w.gw.push_back(g(grid.points[i]) * vol);
    }
  }
  return w;
}

double reduce_mass(const FieldSample& fs, const MassWeights& w, double gamma, double d_like) {
  // exponent gamma X - (gamma^2/2) Var; d_like = gamma^2/2 at criticality.
  std::vector<double> terms(w.idx.size());
  for (size_t k = 0; k < w.idx.size(); ++k) {
    const auto i = w.idx[k];
    terms[k] = w.gw[k] * std::exp(gamma * fs.values[i] - d_like * (*fs.variance)[i]);
  }
  return pairwise_sum(terms);
}

}  // namespace

GmcMassSample critical_mass(const FieldSample& fs, const SetSpec& A, const DensitySpec& g) {
  if (fs.epsilon >= 1.0)
    throw RegimeError("critical_mass: epsilon < 1 required for Seneta-Heyde norming");
  const int d = fs.grid->d;
  const MassWeights w = mass_weights(*fs.grid, A, g);
  if (w.idx.empty()) throw DomainError("critical_mass: A does not meet the grid");
  GmcMassSample m;
  m.norm_factor = std::sqrt(std::log(1.0 / fs.epsilon));
  m.value = m.norm_factor * reduce_mass(fs, w, std::sqrt(2.0 * d), static_cast<double>(d));
  m.critical = true;
  m.epsilon = fs.epsilon;
  m.seed = fs.seed;
  m.replica = fs.replica;
  m.set = std::make_shared<const SetSpec>(A);
  m.density = std::make_shared<const DensitySpec>(g);
  return m;
}

GmcMassSample subcritical_mass(const FieldSample& fs, double gamma, const SetSpec& A,
                               const DensitySpec& g) {
  const int d = fs.grid->d;
  if (gamma < 0 || gamma * gamma >= 2.0 * d)
    throw RegimeError("subcritical_mass: gamma^2 < 2d required");
  const MassWeights w = mass_weights(*fs.grid, A, g);
  if (w.idx.empty()) throw DomainError("subcritical_mass: A does not meet the grid");
  GmcMassSample m;
  m.norm_factor = 1.0;
  m.value = reduce_mass(fs, w, gamma, gamma * gamma / 2.0);
  m.critical = false;
  m.gamma = gamma;
  m.epsilon = fs.epsilon;
  m.seed = fs.seed;
  m.replica = fs.replica;
  m.set = std::make_shared<const SetSpec>(A);
  m.density = std::make_shared<const DensitySpec>(g);
  return m;
}

double q_parameter(double gamma, int d) {
  if (gamma <= 0) throw RegimeError("q_parameter: gamma > 0 required");
  return gamma / 2.0 + d / gamma;
}

double cbar_subcritical(double gamma, int d) {
  if (d != 1 && d != 2) throw DomainError("cbar_subcritical: explicit formulae exist for d in {1,2}");
  const double crit = std::sqrt(2.0 * d);
  if (gamma <= 0 || gamma >= crit) throw RegimeError("cbar_subcritical: 0 < gamma < sqrt(2d) required");
  const double Q = q_parameter(gamma, d);
  const double a = (gamma / 2.0) * (Q - gamma);   // = d/2 - gamma^2/4
  const double b = (2.0 / gamma) * (Q - gamma);
  if (d == 1) {
    // (2 pi)^b / (a * Gamma(a)^{2/gamma^2}), evaluated in logs.
    const double log_c = b * std::log(2.0 * M_PI) - std::log(a) -
                         (2.0 / (gamma * gamma)) * std::lgamma(a);
    return std::exp(log_c);
  }
  // d = 2: a in (0,1), so Gamma(-a) < 0 and the leading minus sign makes
  // the whole expression positive; assemble the positive part in logs.
  const double base = M_PI * std::tgamma(gamma * gamma / 4.0) /
                      std::tgamma(1.0 - gamma * gamma / 4.0);
  const double log_pos = b * std::log(base) - std::log(b) - std::lgamma(a) - std::lgamma(b);
  return std::exp(log_pos) * (-std::tgamma(-a));
}

namespace {

double integrate_box(const Box& box, int d, const std::function<double(const Point&)>& fn,
                     const QuadratureConfig& quad) {
  if (d == 1) {
    return integrate([&](double x) { return fn(Point::of(x)); }, box.lo[0], box.hi[0], quad);
  }
  if (d == 2) {
    return integrate(
        [&](double x) {
          return integrate([&](double y) { return fn(Point::of(x, y)); }, box.lo[1], box.hi[1],
                           quad);
        },
        box.lo[0], box.hi[0], quad);
  }
  return integrate(
      [&](double x) {
        return integrate(
            [&](double y) {
              return integrate([&](double z) { return fn(Point::of(x, y, z)); }, box.lo[2],
                               box.hi[2], quad);
            },
            box.lo[1], box.hi[1], quad);
      },
      box.lo[0], box.hi[0], quad);
}

double integrate_ball(const Ball& ball, int d, const std::function<double(const Point&)>& fn,
                      const QuadratureConfig& quad) {
  const Point& c = ball.center;
  if (d == 1) {
    return integrate([&](double x) { return fn(Point::of(x)); }, c[0] - ball.radius,
                     c[0] + ball.radius, quad);
  }
  if (d == 2) {
    return integrate(
        [&](double rho) {
          return rho * integrate(
                           [&](double th) {
                             return fn(Point::of(c[0] + rho * std::cos(th),
                                                 c[1] + rho * std::sin(th)));
                           },
                           0.0, 2.0 * M_PI, quad);
        },
        0.0, ball.radius, quad);
  }
  // d = 3: spherical coordinates.
  return integrate(
      [&](double rho) {
        return rho * rho *
               integrate(
                   [&](double phi) {
                     return std::sin(phi) *
                            integrate(
                                [&](double th) {
                                  return fn(Point::of(c[0] + rho * std::sin(phi) * std::cos(th),
                                                      c[1] + rho * std::sin(phi) * std::sin(th),
                                                      c[2] + rho * std::cos(phi)));
                                },
                                0.0, 2.0 * M_PI, quad);
                   },
                   0.0, M_PI, quad);
      },
      0.0, ball.radius, quad);
}

}  // namespace

double integrate_over_set(const SetSpec& A, int d,
                          const std::function<double(const Point&)>& fn,
                          const QuadratureConfig& quad) {
  // Nested adaptive passes need a laxer per-axis tolerance than the scalar
  // default to stay cheap; the tail-coefficient integrands are smooth.
  QuadratureConfig q = quad;
  if (d > 1 && q.method == QuadratureConfig::Method::AdaptiveGaussLegendre)
    q.tolerance = std::max(q.tolerance, 1e-10);
  double total = 0.0;
  for (const auto& b : A.boxes) total += integrate_box(b, d, fn, q);
  for (const auto& b : A.balls) total += integrate_ball(b, d, fn, q);
  return total;
}

TailCoeff subcritical_tail_coeff(double gamma, int d,
                                 const std::function<double(const Point&)>& f_diag,
                                 const DensitySpec& g, const SetSpec& A,
                                 const QuadratureConfig& quad) {
  TailCoeff tc;
  tc.cbar = cbar_subcritical(gamma, d);  // validates the regime
  const double Q = q_parameter(gamma, d);
  const double b = (2.0 / gamma) * (Q - gamma);
  tc.exponent = 2.0 * d / (gamma * gamma);
  tc.ratio_factor = b / (b + 1.0);
  const double fexp = (2.0 * d / gamma) * (Q - gamma);
  tc.weight_integral = integrate_over_set(
      A, d,
      [&](const Point& v) { return std::exp(fexp * f_diag(v)) * std::pow(g(v), tc.exponent); },
      quad);
  tc.coefficient = tc.weight_integral * tc.ratio_factor * tc.cbar;
  return tc;
}

double critical_tail_coeff(int d, const DensitySpec& g, const SetSpec& A,
                           const QuadratureConfig& quad) {
  const double gi = integrate_over_set(A, d, [&](const Point& v) { return g(v); }, quad);
  return gi / std::sqrt(M_PI * d);
}

DerivativeCheckReport derivative_approx_check(const std::vector<FieldSample>& fields,
                                              double gamma, const SetSpec& A) {
  if (fields.empty()) throw DomainError("derivative_approx_check: no field samples");
  const int d = fields.front().grid->d;
  const double crit = std::sqrt(2.0 * d);
  if (gamma <= crit - 0.2 || gamma >= crit)
    throw RegimeError("derivative_approx_check: gamma within (sqrt(2d)-0.2, sqrt(2d)) required");
  const DensitySpec one = DensitySpec::constant(1.0);
  std::vector<double> sub(fields.size()), cri(fields.size());
  for (size_t i = 0; i < fields.size(); ++i) {
    sub[i] = subcritical_mass(fields[i], gamma, A, one).value / (crit - gamma);
    cri[i] = std::sqrt(2.0 * M_PI) * critical_mass(fields[i], A, one).value;
  }
  DerivativeCheckReport rep;
  rep.quantile_levels = {0.1, 0.25, 0.5, 0.75, 0.9};
  for (double q : rep.quantile_levels) {
    const double qs = quantile(sub, q), qc = quantile(cri, q);
    rep.quantile_ratios.push_back(qc != 0.0 ? qs / qc : 0.0);
  }
  rep.median_ratio = rep.quantile_ratios[2];
  rep.large_discrepancy = std::abs(rep.median_ratio - 1.0) > 0.5;
  return rep;
}

std::vector<double> sample_mass_batch(const FieldSampler& sampler, bool critical, double gamma,
                                      const SetSpec& A, const DensitySpec& g,
                                      const RngPolicy& rng, uint64_t first_replica, int n,
                                      int workers) {
  const GridSpec& grid = sampler.grid();
  const int d = grid.d;
  if (critical) {
    gamma = std::sqrt(2.0 * d);
    if (sampler.epsilon() >= 1.0) throw RegimeError("sample_mass_batch: epsilon < 1 required");
  } else if (gamma < 0 || gamma * gamma >= 2.0 * d) {
    throw RegimeError("sample_mass_batch: gamma^2 < 2d required");
  }
  const double d_like = critical ? static_cast<double>(d) : gamma * gamma / 2.0;
  const double norm = critical ? std::sqrt(std::log(1.0 / sampler.epsilon())) : 1.0;

  const double vol = grid.cell_volume();
  std::vector<Eigen::Index> idx;
  std::vector<double> gw;
  for (size_t i = 0; i < grid.points.size(); ++i) {
    if (A.contains(grid.points[i])) {
      idx.push_back(static_cast<Eigen::Index>(i));
      gw.push_back(g(grid.points[i]) * vol);
    }
  }
  if (idx.empty()) throw DomainError("sample_mass_batch: A does not meet the grid");

  const Eigen::VectorXd& var = *sampler.variance_ptr();
  std::vector<double> carg(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) carg[k] = d_like * var[idx[k]];

  std::vector<double> masses(static_cast<size_t>(n));
  constexpr int kChunk = 256;
  const auto& factor = sampler.cov().factor;
  const auto npts = factor.rows();

  parallel_for((n + kChunk - 1) / kChunk, workers, [&](int64_t clo, int64_t chi) {
    Eigen::MatrixXd z(npts, kChunk), vals(npts, kChunk);
    std::vector<double> terms(idx.size());
    for (int64_t c = clo; c < chi; ++c) {
      const int64_t lo = c * kChunk;
      const int count = static_cast<int>(std::min<int64_t>(kChunk, n - lo));
      for (int j = 0; j < count; ++j) {
        RngStream s =
            RngStream::derive(rng, streams::field, first_replica + static_cast<uint64_t>(lo + j));
        for (Eigen::Index i = 0; i < npts; ++i) z(i, j) = s.normal();
      }
      vals.leftCols(count).noalias() = factor * z.leftCols(count);
      for (int j = 0; j < count; ++j) {
        for (size_t k = 0; k < idx.size(); ++k)
          terms[k] = gw[k] * std::exp(gamma * vals(idx[k], j) - carg[k]);
        masses[static_cast<size_t>(lo + j)] = norm * pairwise_sum(terms);
      }
    }
  });
  return masses;
}

}  // namespace gmc
