#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gmc/errors.hpp"

namespace gmc {

/// A point in R^d, d <= 3. Unused coordinates stay zero so norms and
/// distances are dimension-agnostic.
struct Point {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  int dim = 1;

  static Point of(double x) { return Point{{x, 0.0, 0.0}, 1}; }
  static Point of(double x, double y) { return Point{{x, y, 0.0}, 2}; }
  static Point of(double x, double y, double z) { return Point{{x, y, z}, 3}; }

  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
  double& operator[](int i) { return v[static_cast<size_t>(i)]; }

  double norm() const { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
};

inline double dist(const Point& a, const Point& b) {
  const double dx = a.v[0] - b.v[0];
  const double dy = a.v[1] - b.v[1];
  const double dz = a.v[2] - b.v[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline bool same_point(const Point& a, const Point& b) {
  return a.v[0] == b.v[0] && a.v[1] == b.v[1] && a.v[2] == b.v[2];
}

struct Box {
  Point lo, hi;

  bool contains(const Point& p) const {
    for (int i = 0; i < p.dim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  double volume(int d) const {
    double vol = 1.0;
    for (int i = 0; i < d; ++i) vol *= hi[i] - lo[i];
    return vol;
  }
};

struct Ball {
  Point center;
  double radius = 1.0;

  bool contains(const Point& p) const { return dist(p, center) <= radius; }
};

/// Union of axis-aligned boxes and balls; membership decided pointwise.
/// Members are assumed pairwise disjoint (a union with overlap would
/// double-count in the quadrature helpers).
struct SetSpec {
  std::vector<Box> boxes;
  std::vector<Ball> balls;

  bool contains(const Point& p) const {
    for (const auto& b : boxes)
      if (b.contains(p)) return true;
    for (const auto& b : balls)
      if (b.contains(p)) return true;
    return false;
  }
  bool empty() const { return boxes.empty() && balls.empty(); }

  static SetSpec box1d(double lo, double hi) {
    return SetSpec{{Box{Point::of(lo), Point::of(hi)}}, {}};
  }
  static SetSpec ball(Point c, double r) { return SetSpec{{}, {Ball{c, r}}}; }
};

/// Nonnegative continuous density g on the test set.
struct DensitySpec {
  enum class Kind { Constant, Affine, Custom };
  Kind kind = Kind::Constant;
  double c0 = 1.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  std::function<double(const Point&)> fn;

  double operator()(const Point& p) const {
    switch (kind) {
      case Kind::Constant:
        return c0;
      case Kind::Affine: {
        double g = c0;
        for (int i = 0; i < p.dim; ++i) g += grad[static_cast<size_t>(i)] * p[i];
        return g;
      }
      case Kind::Custom:
        return fn(p);
    }
    return 0.0;
  }

  static DensitySpec constant(double c) {
    if (c < 0) throw DomainError("density must be nonnegative");
    DensitySpec d;
    d.kind = Kind::Constant;
    d.c0 = c;
    return d;
  }
  static DensitySpec affine(double c0, std::array<double, 3> grad) {
    DensitySpec d;
    d.kind = Kind::Affine;
    d.c0 = c0;
    d.grad = grad;
    return d;
  }
  static DensitySpec custom(std::function<double(const Point&)> f) {
    DensitySpec d;
    d.kind = Kind::Custom;
    d.fn = std::move(f);
    return d;
  }
};

}  // namespace gmc
