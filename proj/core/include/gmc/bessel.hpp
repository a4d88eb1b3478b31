#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gmc/rng.hpp"

namespace gmc {

/// Discretized trajectory; values[i] is the state at time i * h.
struct Path {
  enum class Kind { BM, BES3 };
  double h = 0.0;
  std::vector<double> values;
  Kind kind = Kind::BM;
  double start = 0.0;

  double duration() const { return h * static_cast<double>(values.size() - 1); }
  double time_at(size_t i) const { return h * static_cast<double>(i); }
};

struct HittingRecord {
  double level = 0.0;
  std::optional<double> first_hit;  // interpolated time
  std::optional<double> last_hit;
  std::optional<size_t> first_hit_index;  // lattice index just past the hit
  std::optional<size_t> last_hit_index;
  double ptol = 0.0;  // residual probability that the path returns to level
};

/// Brownian motion on [0, T], exact N(0, h) increments.
Path sample_bm(double T, double h, double start, RngStream& rng);

/// BES(3) as the norm of a 3D Brownian motion started at (start, 0, 0).
Path sample_bes3(double start, double T, double h, RngStream& rng);

/// Brownian motion from 0 run to its first hit of level x > 0 (linear
/// interpolation between lattice points; terminal value snapped to x).
/// Raises TruncationError carrying P(T_x > max_T) if the budget runs out.
std::pair<Path, HittingRecord> run_to_first_hit(double x, double h, RngStream& rng,
                                                double max_T);
/// Same, returning nullopt instead of throwing on truncation.
std::optional<std::pair<Path, HittingRecord>> run_to_first_hit_opt(double x, double h,
                                                                   RngStream& rng, double max_T);

/// Time reversal from the first hit: t -> x - B_{T_x - t}. The result runs
/// a BES(3) leg from 0 up to its last hit of x. Involution on its domain.
Path williams_reverse(const Path& stopped_at_hit);

/// BES(3) from 0 simulated past its last hit of x: the walk continues until
/// it exceeds x / ptol, after which a return to x has probability <= ptol.
/// The stored path may be decimated (h doubled) if the excursion is very
/// long; crossing times are detected at full resolution first.
std::pair<Path, HittingRecord> last_hit_bes3(double x, double h, double ptol, RngStream& rng);

/// Path decomposition of BES_x(3): Brownian motion from x until it hits
/// x*U (U uniform), then x*U plus an independent BES(3) from 0. u_override
/// pins U for construction tests.
Path path_decomposition_sample(double x, double h, double T, RngStream& rng,
                               std::optional<double> u_override = std::nullopt);

/// Change-of-measure weight (1/x) 1{max_{s<=t} B_s <= x} (x - B_t).
double radnik_weight(const Path& p, double x, size_t t_index);

}  // namespace gmc
