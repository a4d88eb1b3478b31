#include "gmc/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "gmc/detail/walkers.hpp"
#include "gmc/errors.hpp"

namespace gmc {

Path sample_bm(double T, double h, double start, RngStream& rng) {
  if (T <= 0 || h <= 0) throw DomainError("sample_bm: T > 0 and h > 0 required");
  const auto n = static_cast<size_t>(std::llround(T / h));
  Path p;
  p.h = h;
  p.kind = Path::Kind::BM;
  p.start = start;
  p.values.resize(n + 1);
  p.values[0] = start;
  const double sd = std::sqrt(h);
  double b = start;
  for (size_t i = 1; i <= n; ++i) {
    b += sd * rng.normal();
    p.values[i] = b;
  }
  return p;
}

Path sample_bes3(double start, double T, double h, RngStream& rng) {
  if (start < 0) throw DomainError("sample_bes3: start >= 0 required");
  if (T <= 0 || h <= 0) throw DomainError("sample_bes3: T > 0 and h > 0 required");
  const auto n = static_cast<size_t>(std::llround(T / h));
  Path p;
  p.h = h;
  p.kind = Path::Kind::BES3;
  p.start = start;
  p.values.resize(n + 1);
  p.values[0] = start;
  detail::Bes3Walk w(h, &rng, start);
  for (size_t i = 1; i <= n; ++i) p.values[i] = w.step(h);
  return p;
}

std::optional<std::pair<Path, HittingRecord>> run_to_first_hit_opt(double x, double h,
                                                                   RngStream& rng,
                                                                   double max_T) {
  if (x <= 0) throw DomainError("run_to_first_hit: x > 0 required");
  if (h <= 0 || max_T <= 0) throw DomainError("run_to_first_hit: h, max_T > 0 required");
  Path p;
  p.h = h;
  p.kind = Path::Kind::BM;
  p.start = 0.0;
  p.values.push_back(0.0);
  const double sd = std::sqrt(h);
  double b = 0.0;
  const auto nmax = static_cast<size_t>(std::llround(max_T / h));
  for (size_t i = 1; i <= nmax; ++i) {
    const double prev = b;
    b += sd * rng.normal();
    double frac = -1.0;
    if (b >= x) {
      frac = (x - prev) / (b - prev);
    } else {
      // hidden excursion: sample the step maximum from the bridge law
      const double gap = x - std::max(prev, b);
      if (gap * gap < 16.0 * h &&
          detail::bridge_max(prev, b, h, rng.uniform01()) >= x)
        frac = 0.5;
    }
    if (frac >= 0.0) {
      HittingRecord rec;
      rec.level = x;
      rec.first_hit = (static_cast<double>(i - 1) + frac) * h;
      rec.first_hit_index = i;
      rec.last_hit = rec.first_hit;
      rec.last_hit_index = i;
      p.values.push_back(x);  // terminal snapped to the level
      return std::make_pair(std::move(p), rec);
    }
    p.values.push_back(b);
  }
  return std::nullopt;
}

std::pair<Path, HittingRecord> run_to_first_hit(double x, double h, RngStream& rng,
                                                double max_T) {
  auto r = run_to_first_hit_opt(x, h, rng, max_T);
  if (!r) {
    // P(T_x > max_T) = P(|B_maxT| < x)
    const double p_exceed = std::erf(x / std::sqrt(2.0 * max_T));
    throw TruncationError("run_to_first_hit: max_T exceeded before hitting level", p_exceed);
  }
  return std::move(*r);
}

Path williams_reverse(const Path& p) {
  if (p.values.size() < 2) throw DomainError("williams_reverse: path too short");
  const double x = p.values.back();
  const bool bm_to_hit = p.kind == Path::Kind::BM && x > p.values.front();
  const bool bes_leg = p.kind == Path::Kind::BES3;
  if (!bm_to_hit && !bes_leg)
    throw DomainError("williams_reverse: input must be stopped at a hit of its level");
  Path r;
  r.h = p.h;
  r.kind = bm_to_hit ? Path::Kind::BES3 : Path::Kind::BM;
  r.start = x - p.values.back();
  r.values.resize(p.values.size());
  const size_t n = p.values.size() - 1;
  for (size_t j = 0; j <= n; ++j) r.values[j] = x - p.values[n - j];
  return r;
}

std::pair<Path, HittingRecord> last_hit_bes3(double x, double h, double ptol, RngStream& rng) {
  if (x <= 0) throw DomainError("last_hit_bes3: x > 0 required");
  if (!(ptol > 0 && ptol <= 0.01)) throw DomainError("last_hit_bes3: ptol in (0, 0.01] required");
  if (h <= 0) throw DomainError("last_hit_bes3: h > 0 required");

  const double escape = x / ptol;
  const double fine_ceiling = x + std::max(1.0, x);
  constexpr size_t kStorageCap = 1u << 22;

  Path p;
  p.h = h;
  p.kind = Path::Kind::BES3;
  p.start = 0.0;
  p.values.push_back(0.0);

  HittingRecord rec;
  rec.level = x;
  rec.ptol = ptol;

  detail::Bes3Walk w(h, &rng, 0.0);
  double h_store = h;
  size_t stride = 1;      // simulate at h, store every stride-th fine sample
  size_t fine_count = 0;  // fine steps taken since t = 0 (in units of h)

  // Far-field excursions are recorded as pending linear segments and only
  // materialized onto the lattice if a later crossing turns out to need
  // them; the post-last-crossing escape is never written out.
  struct GapSeg {
    size_t slots;
    double from, to;
  };
  std::vector<GapSeg> pending;
  size_t pending_slots = 0;

  auto decimate = [&]() {
    std::vector<double> thin((p.values.size() + 1) / 2);
    for (size_t i = 0; i < thin.size(); ++i) thin[i] = p.values[2 * i];
    p.values = std::move(thin);
    h_store *= 2.0;
    stride *= 2;
    p.h = h_store;
  };

  auto append_value = [&](double v) {
    if (p.values.size() >= kStorageCap) decimate();
    p.values.push_back(v);
  };

  auto materialize_pending = [&]() {
    for (const auto& seg : pending) {
      size_t slots = seg.slots;
      // keep lattice alignment through decimations
      while (stride > 1 && slots % stride) ++slots;
      const size_t out = slots / stride;
      for (size_t g = 1; g <= out; ++g)
        append_value(seg.from +
                     (seg.to - seg.from) * static_cast<double>(g) / static_cast<double>(out));
    }
    pending.clear();
    pending_slots = 0;
  };

  while (w.beta < escape) {
    if (w.beta < fine_ceiling) {
      if (!pending.empty()) materialize_pending();
      const double prev = w.beta;
      w.step(h);
      ++fine_count;
      double frac = -1.0;
      if ((prev < x) != (w.beta < x)) {
        frac = (x - prev) / (w.beta - prev);
      } else if (prev < x) {  // both below: bridge max may touch the level
        const double gap = x - std::max(prev, w.beta);
        if (gap * gap < 16.0 * h &&
            detail::bridge_max(prev, w.beta, h, rng.uniform01()) >= x)
          frac = 0.5;
      } else {  // both above: bridge min may dip to the level
        const double gap = std::min(prev, w.beta) - x;
        if (gap * gap < 16.0 * h &&
            detail::bridge_min(prev, w.beta, h, rng.uniform01()) <= x)
          frac = 0.5;
      }
      if (frac >= 0.0) {
        const double tc = w.t - h + frac * h;
        if (!rec.first_hit) {
          rec.first_hit = tc;
          rec.first_hit_index = p.values.size();
        }
        rec.last_hit = tc;
        rec.last_hit_index = p.values.size();
      }
      if (fine_count % stride == 0) append_value(w.beta);
    } else {
      // Lattice-aligned coarse step; the bridge margin keeps the true path
      // above fine_ceiling > x throughout, so no crossing can hide here.
      double tau = w.safe_tau(fine_ceiling);
      tau = std::max(h, std::floor(tau / h) * h);
      const double prev = w.beta;
      w.step(tau);
      fine_count += static_cast<size_t>(std::llround(tau / h));
      const auto slots = static_cast<size_t>(std::llround(tau / h));
      pending.push_back(GapSeg{slots, prev, w.beta});
      pending_slots += slots;
    }
  }

  // Keep the stored path to just past the last crossing.
  if (rec.last_hit) {
    const auto keep = static_cast<size_t>(std::ceil(*rec.last_hit / h_store)) + 2;
    if (p.values.size() > keep) p.values.resize(keep);
    rec.first_hit_index = static_cast<size_t>(std::ceil(*rec.first_hit / h_store));
    rec.last_hit_index = static_cast<size_t>(std::ceil(*rec.last_hit / h_store));
  }
  return {std::move(p), rec};
}

Path path_decomposition_sample(double x, double h, double T, RngStream& rng,
                               std::optional<double> u_override) {
  if (x <= 0) throw DomainError("path_decomposition_sample: x > 0 required");
  if (h <= 0 || T <= 0) throw DomainError("path_decomposition_sample: h, T > 0 required");
  const double u = u_override ? *u_override : rng.uniform01();
  const double switch_level = x * u;

  const auto n = static_cast<size_t>(std::llround(T / h));
  Path p;
  p.h = h;
  p.kind = Path::Kind::BES3;
  p.start = x;
  p.values.resize(n + 1);
  p.values[0] = x;

  size_t i = 1;
  double b = x;
  const double sd = std::sqrt(h);
  bool switched = switch_level >= x;  // U = 1 has no Brownian segment
  detail::Bes3Walk bes(h, &rng, 0.0);

  if (!switched) {
    for (; i <= n; ++i) {
      const double prev = b;
      b += sd * rng.normal();
      double frac = -1.0;
      if (b <= switch_level) {
        frac = (prev - switch_level) / (prev - b);
      } else {
        const double gap = std::min(prev, b) - switch_level;
        if (gap * gap < 16.0 * h &&
            detail::bridge_min(prev, b, h, rng.uniform01()) <= switch_level)
          frac = 0.5;
      }
      if (frac >= 0.0) {
        // Switch time inside this lattice step, then a fresh BES(3) leg
        // over the remainder.
        const double delta = (1.0 - frac) * h;
        if (delta > 0) bes.step(delta);
        p.values[i] = switch_level + bes.beta;
        ++i;
        switched = true;
        break;
      }
      p.values[i] = b;
    }
  }
  for (; i <= n; ++i) p.values[i] = switch_level + bes.step(h);
  return p;
}

double radnik_weight(const Path& p, double x, size_t t_index) {
  if (x <= 0) throw DomainError("radnik_weight: x > 0 required");
  if (p.kind != Path::Kind::BM || p.values.empty() || p.values.front() != 0.0)
    throw DomainError("radnik_weight: Brownian path from 0 required");
  if (t_index >= p.values.size()) throw DomainError("radnik_weight: index out of range");
  double running_max = 0.0;
  for (size_t i = 0; i <= t_index; ++i) running_max = std::max(running_max, p.values[i]);
  if (running_max > x) return 0.0;
  return (x - p.values[t_index]) / x;
}

}  // namespace gmc
