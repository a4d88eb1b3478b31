#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gmc {

/// Reproducibility policy: one master seed, per-replica streams derived by
/// counter-style hashing. Identical (seed, purpose, replica) always yields
/// the identical stream, independent of worker count or scheduling.
struct RngPolicy {
  uint64_t master_seed = 0;
};

/// Stable purpose tags so distinct operations sharing a master seed cannot
/// collide on streams.
namespace streams {
inline constexpr uint64_t field = 1;
inline constexpr uint64_t shift = 2;
inline constexpr uint64_t radial = 3;
inline constexpr uint64_t bm = 4;
inline constexpr uint64_t bes3 = 5;
inline constexpr uint64_t first_hit = 6;
inline constexpr uint64_t last_hit = 7;
inline constexpr uint64_t path_dec = 8;
inline constexpr uint64_t toy_lhs = 9;
inline constexpr uint64_t toy_ix = 10;
inline constexpr uint64_t toy_vw = 11;
inline constexpr uint64_t synthetic = 12;
}  // namespace streams

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ stream seeded by hashing (seed, purpose, replica).
class RngStream {
 public:
  static RngStream derive(uint64_t seed, uint64_t purpose, uint64_t replica) {
    RngStream r;
    uint64_t h = seed;
    (void)splitmix64(h);
    h ^= 0x6a09e667f3bcc909ULL * purpose;
    (void)splitmix64(h);
    h ^= 0xbb67ae8584caa73bULL * (replica + 1);
    for (auto& s : r.s_) s = splitmix64(h);
    return r;
  }
  static RngStream derive(const RngPolicy& p, uint64_t purpose, uint64_t replica) {
    return derive(p.master_seed, purpose, replica);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on (0, 1); never returns 0 so log() is safe.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal, Box-Muller with one cached mate.
  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    have_cache_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> s_{1, 2, 3, 4};
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace gmc
