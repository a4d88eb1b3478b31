#include "gmc/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "gmc/errors.hpp"
#include "gmc/parallel.hpp"

namespace gmc {

TailScan estimate_tail(std::span<const double> values, const std::vector<double>& t_grid) {
  if (values.size() < 1000) throw DomainError("estimate_tail: n >= 10^3 required");
  if (t_grid.empty()) throw DomainError("estimate_tail: empty t grid");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  TailScan scan;
  scan.n = static_cast<int64_t>(sorted.size());
  for (double t : t_grid) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    const auto k = static_cast<int64_t>(above);
    const double p = static_cast<double>(k) / static_cast<double>(scan.n);
    const auto ci = wilson_interval(k, scan.n);
    scan.t.push_back(t);
    scan.p_hat.push_back(p);
    scan.ci_lo.push_back(ci.lo);
    scan.ci_hi.push_back(ci.hi);
    scan.t_p.push_back(t * p);
    scan.count.push_back(k);
  }
  return scan;
}

CoefficientFit fit_power_law(const TailScan& scan, std::optional<double> fixed_exponent) {
  const size_t m = scan.t.size();
  std::vector<size_t> eligible;
  for (size_t i = 0; i < m; ++i)
    if (scan.count[i] >= 10) eligible.push_back(i);
  if (eligible.size() < 5)
    throw DomainError("fit_power_law: need >= 5 grid points with count >= 10");

  CoefficientFit fit;
  if (fixed_exponent) {
    const double q = *fixed_exponent;
    fit.exponent = q;
    fit.exponent_fixed = true;
    // Widest eligible window (log width, then point count) whose plateau
    // column t^q p_hat is flat within 1.5.
    std::vector<double> y(m, 0.0);
    for (size_t i = 0; i < m; ++i) y[i] = std::pow(scan.t[i], q) * scan.p_hat[i];
    size_t best_lo = 0, best_hi = 0;
    double best_width = -1.0;
    for (size_t a = 0; a < eligible.size(); ++a) {
      double ymin = y[eligible[a]], ymax = ymin;
      for (size_t b = a; b < eligible.size(); ++b) {
        if (eligible[b] - eligible[a] != b - a) break;  // window must be contiguous
        ymin = std::min(ymin, y[eligible[b]]);
        ymax = std::max(ymax, y[eligible[b]]);
        if (ymin <= 0.0 || ymax / ymin > 1.5) break;
        const double width = std::log(scan.t[eligible[b]] / scan.t[eligible[a]]);
        const bool better = width > best_width ||
                            (width == best_width && b - a > best_hi - best_lo);
        if (better && b - a + 1 >= 3) {
          best_width = width;
          best_lo = eligible[a];
          best_hi = eligible[b];
        }
      }
    }
    if (best_width < 0) throw DomainError("fit_power_law: no flat plateau window found");
    double sw = 0.0, swy = 0.0, ymin = 1e300, ymax = 0.0;
    for (size_t i = best_lo; i <= best_hi; ++i) {
      const double p = scan.p_hat[i];
      const double var =
          std::pow(scan.t[i], 2 * q) * std::max(p * (1 - p), 1e-12 / static_cast<double>(scan.n)) /
          static_cast<double>(scan.n);
      const double w = 1.0 / var;
      sw += w;
      swy += w * y[i];
      ymin = std::min(ymin, y[i]);
      ymax = std::max(ymax, y[i]);
      ++fit.points_used;
    }
    fit.c_hat = swy / sw;
    // Bins share one sample, so this classical stderr is optimistic; the
    // plateau flatness is the honest spread diagnostic.
    fit.stderr_ = std::sqrt(1.0 / sw);
    fit.t_lo = scan.t[best_lo];
    fit.t_hi = scan.t[best_hi];
    fit.flatness = ymax / ymin;
    return fit;
  }

  // Free exponent: WLS of log p on log t over the eligible points.
  std::vector<double> lx, ly, w;
  double ymin = 1e300, ymax = 0.0;
  for (size_t i : eligible) {
    const double p = scan.p_hat[i];
    lx.push_back(std::log(scan.t[i]));
    ly.push_back(std::log(p));
    w.push_back(static_cast<double>(scan.n) * p / (1 - p));
    ymin = std::min(ymin, scan.t_p[i]);
    ymax = std::max(ymax, scan.t_p[i]);
  }
  const LineFit lf = wls_fit(lx, ly, w);
  fit.exponent_fixed = false;
  fit.exponent = -lf.slope;
  fit.slope_se = lf.slope_se;
  fit.c_hat = std::exp(lf.intercept);
  fit.stderr_ = fit.c_hat * lf.intercept_se;
  fit.t_lo = scan.t[eligible.front()];
  fit.t_hi = scan.t[eligible.back()];
  fit.flatness = ymax / std::max(ymin, 1e-300);
  fit.points_used = eligible.size();
  return fit;
}

LaplaceScan laplace_sq(std::span<const double> values, const std::vector<double>& lambda_grid) {
  if (values.empty()) throw DomainError("laplace_sq: empty sample");
  LaplaceScan scan;
  scan.tag = LaplaceScan::Tag::Sq;
  scan.n = static_cast<int64_t>(values.size());
  std::vector<double> term(values.size());
  for (double lam : lambda_grid) {
    if (lam <= 0) throw DomainError("laplace_sq: lambda > 0 required");
    for (size_t i = 0; i < values.size(); ++i)
      term[i] = -std::expm1(-lam * values[i] * values[i]);
    const auto m = mean_stderr(term);
    const double s = std::sqrt(lam);
    scan.lambda.push_back(lam);
    scan.estimate.push_back(m.mean / s);
    scan.stderr_.push_back(m.stderr_ / s);
  }
  return scan;
}

LaplaceScan laplace_log(std::span<const double> values, const std::vector<double>& lambda_grid) {
  if (values.empty()) throw DomainError("laplace_log: empty sample");
  LaplaceScan scan;
  scan.tag = LaplaceScan::Tag::Log;
  scan.n = static_cast<int64_t>(values.size());
  std::vector<double> term(values.size());
  for (double lam : lambda_grid) {
    if (!(lam > 0 && lam < 1))
      throw DomainError("laplace_log: lambda in (0,1) required (sign of -log lambda)");
    for (size_t i = 0; i < values.size(); ++i)
      term[i] = values[i] * std::exp(-lam * values[i]);
    const auto m = mean_stderr(term);
    const double d = -std::log(lam);
    scan.lambda.push_back(lam);
    scan.estimate.push_back(m.mean / d);
    scan.stderr_.push_back(m.stderr_ / d);
  }
  return scan;
}

namespace {

// E[U e^{-lambda U}] for the oscillating survival law via the identity
// E[g(U)] = g(0) + int g'(u) P(U>u) du, g(u) = u e^{-lambda u}; the u >= 1
// piece is integrated in w = log u where it is smooth and O(1).
double counterexample_laplace(double a, double lam, const QuadratureConfig& quad) {
  const double head = std::exp(-lam);  // int_0^1 (1-lam u) e^{-lam u} du
  const double w_hi = std::log(45.0 / lam);
  QuadratureConfig q = quad;
  q.tolerance = std::min(q.tolerance, 1e-12);
  const double tail = integrate(
      [a, lam](double w) {
        const double u = std::exp(w);
        return std::exp(-lam * u) * (1.0 - lam * u) * (1.0 + a * std::sin(w));
      },
      0.0, w_hi, q);
  return head + tail;
}

}  // namespace

TauberianReport tauberian_counterexample(double a, const std::vector<double>& lambda_grid,
                                         const std::vector<double>& t_grid,
                                         const QuadratureConfig& quad) {
  if (std::abs(a) >= 1) throw DomainError("tauberian_counterexample: |a| < 1 required");
  const double euler = 0.57721566490153286060651209;
  TauberianReport rep;
  rep.a = a;
  for (double lam : lambda_grid) {
    if (!(lam > 0 && lam < 1)) throw DomainError("tauberian_counterexample: lambda in (0,1)");
    const double e = counterexample_laplace(a, lam, quad);
    rep.lambda.push_back(lam);
    rep.e_val.push_back(e);
    rep.ratio_neg_log.push_back(e / (-std::log(lam)));
    rep.ratio_oracle.push_back(e / (-std::log(lam) - euler));
  }
  rep.oscillation_amplitude = std::abs(a);
  double lo = 1e300, hi = -1e300;
  for (double t : t_grid) {
    if (t < 1) throw DomainError("tauberian_counterexample: t >= 1 required");
    const double tp = 1.0 + a * std::sin(std::log(t));
    rep.t.push_back(t);
    rep.t_survival.push_back(tp);
    lo = std::min(lo, tp);
    hi = std::max(hi, tp);
  }
  rep.band_lo = lo;
  rep.band_hi = hi;
  return rep;
}

double SyntheticPareto::draw(RngStream& rng) const {
  return std::pow(c / rng.uniform01(), 1.0 / q);
}

double SyntheticPareto::survival(double t) const {
  const double s = c * std::pow(t, -q);
  return std::min(1.0, s);
}

double law_moment(const LawSpec& law, double q, const QuadratureConfig& quad) {
  switch (law.kind) {
    case LawSpec::Kind::Zero:
      return 0.0;
    case LawSpec::Kind::Constant:
      return std::pow(law.value, q);
    case LawSpec::Kind::LogNormal:
      // int e^{q(mu + sigma z)} phi(z) dz over +-12 sd
      return integrate(
          [&](double z) {
            return std::exp(q * (law.mu + law.sigma * z)) * std::exp(-0.5 * z * z) /
                   std::sqrt(2.0 * M_PI);
          },
          -12.0, 12.0, quad);
    case LawSpec::Kind::Uniform:
      return integrate([&](double v) { return std::pow(v, q); }, law.lo, law.hi, quad) /
             (law.hi - law.lo);
  }
  return 0.0;
}

ProductTailReport aux_product_tail(const SyntheticPareto& u_spec, const LawSpec& v_spec,
                                   double q, const std::vector<double>& t_grid, int n,
                                   const RngPolicy& rng, const QuadratureConfig& quad) {
  if (q <= 0) throw DomainError("aux_product_tail: q > 0 required");
  std::vector<double> uv(static_cast<size_t>(n));
  parallel_for(n, 0, [&](int64_t lo, int64_t hi) {
    for (int64_t i = lo; i < hi; ++i) {
      RngStream s = RngStream::derive(rng, streams::synthetic, static_cast<uint64_t>(i));
      const double u = u_spec.draw(s);
      const double v = v_spec.draw(s);
      uv[static_cast<size_t>(i)] = u * v;
    }
  });
  ProductTailReport rep;
  rep.e_v_q = law_moment(v_spec, q, quad);
  const TailScan scan = estimate_tail(uv, t_grid);
  rep.t = scan.t;
  rep.p_hat = scan.p_hat;
  rep.ci_lo = scan.ci_lo;
  rep.ci_hi = scan.ci_hi;
  for (double t : scan.t) rep.predicted.push_back(u_spec.c * rep.e_v_q * std::pow(t, -q));
  for (size_t i = 0; i < scan.t.size(); ++i)
    if (scan.ci_lo[i] > rep.predicted[i]) rep.upper_bound_holds = false;
  return rep;
}

SplittingReport splitting_check(std::span<const double> whole, std::span<const double> plus,
                                std::span<const double> minus,
                                const std::vector<double>& lambda_grid) {
  if (whole.size() != plus.size() || whole.size() != minus.size() || whole.empty())
    throw DomainError("splitting_check: mismatched replica pairing");
  SplittingReport rep;
  std::vector<double> ta(whole.size()), tp(whole.size()), tm(whole.size()), tc(whole.size());
  for (double lam : lambda_grid) {
    if (lam <= 0) throw DomainError("splitting_check: lambda > 0 required");
    for (size_t i = 0; i < whole.size(); ++i) {
      ta[i] = -std::expm1(-lam * whole[i] * whole[i]);
      tp[i] = -std::expm1(-lam * plus[i] * plus[i]);
      tm[i] = -std::expm1(-lam * minus[i] * minus[i]);
      tc[i] = -std::expm1(-2.0 * lam * plus[i] * minus[i]);
    }
    const double s = std::sqrt(lam);
    const double ea = pairwise_sum(ta) / static_cast<double>(whole.size());
    const double ep = pairwise_sum(tp) / static_cast<double>(whole.size());
    const double em = pairwise_sum(tm) / static_cast<double>(whole.size());
    const double ec = pairwise_sum(tc) / static_cast<double>(whole.size());
    rep.lambda.push_back(lam);
    rep.residual.push_back((ea - ep - em) / s);
    rep.cross.push_back(ec / s);
    rep.main_sum.push_back((ep + em) / s);
  }
  return rep;
}

MeanStderr cross_moment_estimate(std::span<const double> b1, std::span<const double> b2,
                                 double h) {
  if (b1.size() != b2.size() || b1.empty())
    throw DomainError("cross_moment_estimate: mismatched replica pairing");
  if (h < 0 || h >= 1) throw DomainError("cross_moment_estimate: h in [0,1) required");
  if (h == 0.0) return {1.0, 0.0, static_cast<int64_t>(b1.size())};
  std::vector<double> term(b1.size());
  for (size_t i = 0; i < b1.size(); ++i) term[i] = std::pow(b1[i] * b2[i], h);
  return mean_stderr(term);
}

}  // namespace gmc
