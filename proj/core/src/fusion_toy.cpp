#include "gmc/fusion_toy.hpp"

#include <algorithm>
#include <cmath>

#include "gmc/detail/walkers.hpp"
#include "gmc/errors.hpp"
#include "gmc/parallel.hpp"
#include "gmc/stats.hpp"

namespace gmc {

LawSpec LawSpec::constant(double c) {
  if (c < 0) throw DomainError("LawSpec: nonnegative laws only");
  LawSpec l;
  l.kind = Kind::Constant;
  l.value = c;
  return l;
}

LawSpec LawSpec::lognormal(double mu, double sigma) {
  if (sigma < 0) throw DomainError("LawSpec: sigma >= 0 required");
  LawSpec l;
  l.kind = Kind::LogNormal;
  l.mu = mu;
  l.sigma = sigma;
  return l;
}

LawSpec LawSpec::uniform(double lo, double hi) {
  if (lo < 0 || hi <= lo) throw DomainError("LawSpec: 0 <= lo < hi required");
  LawSpec l;
  l.kind = Kind::Uniform;
  l.lo = lo;
  l.hi = hi;
  return l;
}

void ToyConfig::validate() const {
  if (d < 1) throw DomainError("ToyConfig: d >= 1 required");
  // lambda = 0 is allowed on the lhs (where it degenerates to sqrt(t));
  // the rhs-side entry points re-check positivity where -log(lambda)
  // or the decay bound is needed.
  if (lambda < 0) throw DomainError("ToyConfig: lambda >= 0 required");
  if (t <= 0) throw DomainError("ToyConfig: t > 0 required");
  if (h <= 0 || h > t / 100.0) throw DomainError("ToyConfig: 0 < h <= t/100 required");
  if (!(ptol > 0 && ptol <= 0.01)) throw DomainError("ToyConfig: ptol in (0, 0.01] required");
  if (x_max < 0) throw DomainError("ToyConfig: x_max >= 0 required");
}

double ToyConfig::resolved_x_max() const {
  if (x_max > 0) return x_max;
  // Past x* = (-log lambda)/kappa the integrand is dead; ten extra e-folds
  // keep the certified remainder far below MC resolution.
  return (-std::log(lambda) + 10.0) / kappa() + 2.0;
}

double exp_functional(const Path& p, int d) {
  if (p.values.size() < 2) throw DomainError("exp_functional: path too short");
  const double kappa = std::sqrt(2.0 * d);
  double acc = 0.0;
  double prev = std::exp(kappa * p.values[0]);
  for (size_t i = 1; i < p.values.size(); ++i) {
    const double cur = std::exp(kappa * p.values[i]);
    acc += 0.5 * p.h * (prev + cur);
    prev = cur;
  }
  return acc;
}

double exp_functional_bm(double t, double h, int d, RngStream& rng) {
  if (t <= 0 || h <= 0) throw DomainError("exp_functional_bm: t, h > 0 required");
  const double kappa = std::sqrt(2.0 * d);
  const auto n = static_cast<size_t>(std::llround(t / h));
  const double sd = std::sqrt(h);
  double b = 0.0, acc = 0.0, prev = 1.0;
  for (size_t i = 0; i < n; ++i) {
    b += sd * rng.normal();
    const double cur = std::exp(kappa * b);
    acc += 0.5 * h * (prev + cur);
    prev = cur;
  }
  return acc;
}

McEstimate lhs_estimate(const ToyConfig& cfg, int n, const RngPolicy& rng, int workers) {
  cfg.validate();
  if (n < 1000) throw DomainError("lhs_estimate: n >= 10^3 required");
  const double kappa = cfg.kappa();
  const auto nsteps = static_cast<size_t>(std::llround(cfg.t / cfg.h));
  const double sqrt_t = std::sqrt(cfg.t);
  std::vector<double> sample(static_cast<size_t>(n));
  parallel_for(n, workers, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      RngStream path_rng = RngStream::derive(rng, streams::toy_lhs, static_cast<uint64_t>(r));
      const double sd = std::sqrt(cfg.h);
      double b = 0.0, acc = 0.0, prev = 1.0;
      for (size_t i = 0; i < nsteps; ++i) {
        b += sd * path_rng.normal();
        const double cur = std::exp(kappa * b);
        acc += 0.5 * cfg.h * (prev + cur);
        prev = cur;
      }
      RngStream vw = RngStream::derive(rng, streams::toy_vw, static_cast<uint64_t>(r));
      const double v = cfg.V.draw(vw);
      const double w = cfg.W.draw(vw);
      sample[static_cast<size_t>(r)] =
          sqrt_t * std::exp(-cfg.lambda * (acc + std::exp(kappa * b) * v + w));
    }
  });
  const auto m = mean_stderr(sample);
  return {m.mean, m.stderr_, m.n, 0.0};
}

namespace toy_detail {

namespace {

// Level where e^{-kappa y} mass and crossing structure both need the fine
// lattice; everything above runs on guarded coarse steps.
double fine_ceiling_for(double kappa, double ptol, double top_level) {
  const double y_acc = (-std::log(ptol) + 4.0) / kappa;
  return std::max(top_level + 1.0, y_acc);
}

double solve_forward_stop_level(double kappa, double ptol) {
  double lo = 0.1, hi = 16.0 / (kappa * kappa * kappa * ptol);
  while (detail::bes3_exp_occupation(kappa, hi) > ptol) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (detail::bes3_exp_occupation(kappa, mid) > ptol ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

std::vector<double> negative_side_direct(const std::vector<double>& levels, double h,
                                         double ptol, double kappa, RngStream& rng) {
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw DomainError("negative_side_direct: levels must ascend");
  std::vector<double> neg(levels.size(), 0.0);
  double top = 0.0;
  for (double x : levels) top = std::max(top, x);
  if (top == 0.0) return neg;

  const double escape = top / ptol;
  const double ceiling = fine_ceiling_for(kappa, ptol, top);
  detail::Bes3Walk w(h, &rng, 0.0);
  double acc = 0.0;

  while (w.beta < escape) {
    const double tau = w.beta < ceiling ? h : w.safe_tau(ceiling);
    const double prev = w.beta;
    const double fprev = std::exp(-kappa * prev);
    w.step(tau);
    const double cur = w.beta;
    const double fcur = std::exp(-kappa * cur);
    // Step extremes from the bridge law: every level inside [m*, M*] is
    // touched during the step, which is exactly what the last crossing
    // needs. The uniform draw is spent only when a level is within reach.
    double hi = std::max(prev, cur), lo = std::min(prev, cur);
    auto above = std::upper_bound(levels.begin(), levels.end(), hi);
    if (above != levels.end()) {
      const double gap = *above - hi;
      if (gap * gap < 16.0 * tau) hi = detail::bridge_max(prev, cur, tau, rng.uniform01());
    }
    auto at_or_above = std::lower_bound(levels.begin(), levels.end(), lo);
    if (at_or_above != levels.begin()) {
      const double gap = lo - *(at_or_above - 1);
      if (gap * gap < 16.0 * tau)
        lo = std::max(0.0, detail::bridge_min(prev, cur, tau, rng.uniform01()));
    }
    for (auto it = std::upper_bound(levels.begin(), levels.end(), lo);
         it != levels.end() && *it <= hi; ++it) {
      if (*it <= 0.0) continue;
      const bool endpoint_cross = (prev < *it) != (cur < *it);
      const double frac =
          endpoint_cross ? ((cur != prev) ? (*it - prev) / (cur - prev) : 0.5) : 0.5;
      const double fx = std::exp(-kappa * *it);
      neg[static_cast<size_t>(it - levels.begin())] =
          acc + 0.5 * tau * frac * (fprev + fx);
    }
    acc += 0.5 * tau * (fprev + fcur);
  }
  // Same-value duplicate levels share the last snapshot.
  for (size_t i = 1; i < levels.size(); ++i)
    if (levels[i] == levels[i - 1]) neg[i] = neg[i - 1];
  return neg;
}

std::vector<double> negative_side_reversal(const std::vector<double>& levels, double h,
                                           double ptol, double kappa, RngStream& rng) {
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw DomainError("negative_side_reversal: levels must ascend");
  std::vector<double> neg(levels.size(), 0.0);
  double top = 0.0;
  for (double x : levels) top = std::max(top, x);
  if (top == 0.0) return neg;

  // P(T_top > max_T) ~ ptol; a truncated attempt is retried (conditioning
  // of the same order as the certified residual).
  const double max_t = 2.0 * top * top / (M_PI * ptol * ptol);
  const double y_acc = (-std::log(ptol) + 4.0) / kappa;

  for (int attempt = 0; attempt < 64; ++attempt) {
    detail::BmWalk w(h, &rng, 0.0);
    double acc = 0.0;
    size_t next = 0;
    while (next < levels.size() && levels[next] <= 0.0) ++next;
    bool done = false;
    while (!done && w.t < max_t) {
      const double tau = (w.b > top - y_acc) ? h : w.safe_tau(top - y_acc + 1.0);
      const double prev = w.b;
      const double fprev = std::exp(kappa * prev);
      w.step(tau);
      const double cur = w.b;
      const double fcur = std::exp(kappa * cur);
      double peak = std::max(prev, cur);
      // bridge max catches first hits the lattice endpoints miss
      const double gap = levels[next] - peak;
      if (gap > 0 && gap * gap < 16.0 * tau)
        peak = detail::bridge_max(prev, cur, tau, rng.uniform01());
      while (next < levels.size() && peak >= levels[next]) {
        const double x = levels[next];
        const bool endpoint_cross = cur >= x;
        const double frac =
            endpoint_cross ? ((cur != prev) ? (x - prev) / (cur - prev) : 0.5) : 0.5;
        const double fx = std::exp(kappa * x);
        neg[next] = std::exp(-kappa * x) * (acc + 0.5 * tau * frac * (fprev + fx));
        ++next;
        if (next == levels.size()) {
          done = true;
          break;
        }
      }
      acc += 0.5 * tau * (fprev + fcur);
    }
    if (done) {
      for (size_t i = 1; i < levels.size(); ++i)
        if (levels[i] == levels[i - 1]) neg[i] = neg[i - 1];
      return neg;
    }
  }
  throw TruncationError("negative_side_reversal: first hit not reached",
                        std::erf(top / std::sqrt(2.0 * 2.0 * top * top / (M_PI * ptol * ptol))));
}

double forward_side(double h, double ptol, double kappa, RngStream& rng, double* bound_out) {
  const double stop_level = solve_forward_stop_level(kappa, ptol);
  const double ceiling = fine_ceiling_for(kappa, ptol, 0.0);
  detail::Bes3Walk w(h, &rng, 0.0);
  double acc = 0.0;
  while (w.beta < stop_level) {
    const double tau = w.beta < ceiling ? h : w.safe_tau(ceiling);
    const double fprev = std::exp(-kappa * w.beta);
    w.step(tau);
    acc += 0.5 * tau * (fprev + std::exp(-kappa * w.beta));
  }
  if (bound_out) *bound_out = detail::bes3_exp_occupation(kappa, w.beta);
  return acc;
}

}  // namespace toy_detail

IxSample sample_Ix(double x, int d, IxSample::Method method, double h, double ptol,
                   RngStream& rng) {
  if (x < 0) throw DomainError("sample_Ix: x >= 0 required");
  if (d < 1) throw DomainError("sample_Ix: d >= 1 required");
  if (h <= 0 || !(ptol > 0 && ptol <= 0.01))
    throw DomainError("sample_Ix: h > 0 and ptol in (0, 0.01] required");
  const double kappa = std::sqrt(2.0 * d);
  std::vector<double> levels{x};
  double neg = 0.0;
  if (x > 0.0) {
    neg = (method == IxSample::Method::Direct)
              ? toy_detail::negative_side_direct(levels, h, ptol, kappa, rng)[0]
              : toy_detail::negative_side_reversal(levels, h, ptol, kappa, rng)[0];
  }
  const double fwd = toy_detail::forward_side(h, ptol, kappa, rng);
  IxSample s;
  s.x = x;
  s.method = method;
  s.value = neg + fwd;
  return s;
}

McEstimate rhs_estimate(const ToyConfig& cfg, int n_inner, const std::vector<double>& x_grid,
                        const RngPolicy& rng, int workers) {
  cfg.validate();
  if (cfg.lambda <= 0) throw DomainError("rhs_estimate: lambda > 0 required");
  if (x_grid.size() < 2 || x_grid.front() != 0.0)
    throw DomainError("rhs_estimate: x_grid must span [0, x_max] starting at 0");
  if (!std::is_sorted(x_grid.begin(), x_grid.end()))
    throw DomainError("rhs_estimate: x_grid must ascend");
  const double kappa = cfg.kappa();
  const double x_top = x_grid.back();
  const double sqrt_2_pi = std::sqrt(2.0 / M_PI);

  std::vector<double> sample(static_cast<size_t>(n_inner));
  std::vector<double> remainder(static_cast<size_t>(n_inner));
  parallel_for(n_inner, workers, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      RngStream s = RngStream::derive(rng, streams::toy_ix, static_cast<uint64_t>(r));
      // Time reversal backs the negative side; the direct sampler is the
      // cross-check (they agree in law and the tests exercise both).
      const auto neg = toy_detail::negative_side_reversal(x_grid, cfg.h, cfg.ptol, kappa, s);
      const double fwd = toy_detail::forward_side(cfg.h, cfg.ptol, kappa, s);
      RngStream vw = RngStream::derive(rng, streams::toy_vw, static_cast<uint64_t>(r));
      (void)cfg.V.draw(vw);  // V has no slot on this side of the identity
      const double w = cfg.W.draw(vw);
      double integral = 0.0;
      double prev = std::exp(-cfg.lambda * (neg[0] + fwd + w));
      for (size_t j = 1; j < x_grid.size(); ++j) {
        const double ix = neg[j] + fwd;
        const double cur = std::exp(-cfg.lambda * (std::exp(kappa * x_grid[j]) * ix + w));
        integral += 0.5 * (x_grid[j] - x_grid[j - 1]) * (prev + cur);
        prev = cur;
      }
      sample[static_cast<size_t>(r)] = sqrt_2_pi * integral;
      // I_x is pathwise nondecreasing, so the dropped tail is bounded by
      // the x_max draw pushed through the exponential integral.
      const double arg = cfg.lambda * std::exp(kappa * x_top) * (neg.back() + fwd);
      remainder[static_cast<size_t>(r)] =
          arg > 700.0 ? 0.0 : sqrt_2_pi * expint_e1(arg) / kappa;
    }
  });
  const auto m = mean_stderr(sample);
  const auto b = mean_stderr(remainder);
  return {m.mean, m.stderr_, m.n, b.mean};
}

std::vector<LimitResultRow> limit_result_check(const std::vector<double>& lambda_grid,
                                               const ToyConfig& cfg, int n,
                                               const RngPolicy& rng, int workers) {
  cfg.validate();
  if (lambda_grid.empty()) throw DomainError("limit_result_check: empty lambda grid");
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0 && lambda_grid[i] < 0.5))
      throw DomainError("limit_result_check: lambda in (0, 1/2) required");
    if (i > 0 && lambda_grid[i] >= lambda_grid[i - 1])
      throw DomainError("limit_result_check: lambda grid must decrease");
  }
  const double kappa = cfg.kappa();
  ToyConfig wide = cfg;
  wide.lambda = lambda_grid.back();
  const double x_top = wide.resolved_x_max();
  std::vector<double> x_grid;
  for (double x = 0.0; x < x_top; x += 0.25) x_grid.push_back(x);
  x_grid.push_back(x_top);

  const size_t nl = lambda_grid.size();
  std::vector<std::vector<double>> integrals(nl, std::vector<double>(static_cast<size_t>(n)));
  std::vector<std::vector<double>> rem(nl, std::vector<double>(static_cast<size_t>(n)));

  parallel_for(n, workers, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      RngStream s = RngStream::derive(rng, streams::toy_ix, static_cast<uint64_t>(r));
      const auto neg = toy_detail::negative_side_reversal(x_grid, cfg.h, cfg.ptol, kappa, s);
      const double fwd = toy_detail::forward_side(cfg.h, cfg.ptol, kappa, s);
      RngStream vw = RngStream::derive(rng, streams::toy_vw, static_cast<uint64_t>(r));
      const double w = cfg.W.draw(vw);
      for (size_t li = 0; li < nl; ++li) {
        const double lam = lambda_grid[li];
        double integral = 0.0;
        double prev = std::exp(-lam * (neg[0] + fwd + w));
        for (size_t j = 1; j < x_grid.size(); ++j) {
          const double cur =
              std::exp(-lam * (std::exp(kappa * x_grid[j]) * (neg[j] + fwd) + w));
          integral += 0.5 * (x_grid[j] - x_grid[j - 1]) * (prev + cur);
          prev = cur;
        }
        integrals[li][static_cast<size_t>(r)] = integral;
        const double arg = lam * std::exp(kappa * x_top) * (neg.back() + fwd);
        rem[li][static_cast<size_t>(r)] = arg > 700.0 ? 0.0 : expint_e1(arg) / kappa;
      }
    }
  });

  std::vector<LimitResultRow> rows(nl);
  for (size_t li = 0; li < nl; ++li) {
    const double denom = -std::log(lambda_grid[li]);
    const auto m = mean_stderr(integrals[li]);
    const auto b = mean_stderr(rem[li]);
    rows[li] = {lambda_grid[li], m.mean / denom, m.stderr_ / denom, b.mean / denom};
  }
  return rows;
}

double chi3_laplace(double s, int d, const QuadratureConfig& quad) {
  if (s <= 0) throw DomainError("chi3_laplace: s > 0 required");
  if (d < 1) throw DomainError("chi3_laplace: d >= 1 required");
  const double a = std::sqrt(2.0 * d * s);
  const double pref = std::sqrt(2.0 / M_PI);
  return pref * integrate([a](double y) { return y * y * std::exp(-a * y - 0.5 * y * y); },
                          0.0, 42.0, quad);
}

}  // namespace gmc
