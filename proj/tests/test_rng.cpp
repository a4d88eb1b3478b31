#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "gmc/rng.hpp"
#include "gmc/stats.hpp"

using namespace gmc;

TEST_CASE("identical (seed, purpose, replica) gives identical streams") {
  RngStream a = RngStream::derive(42, streams::field, 7);
  RngStream b = RngStream::derive(42, streams::field, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams differ across replicas and purposes") {
  RngStream a = RngStream::derive(42, streams::field, 7);
  RngStream b = RngStream::derive(42, streams::field, 8);
  RngStream c = RngStream::derive(42, streams::shift, 7);
  CHECK(a.next_u64() != b.next_u64());
  RngStream a2 = RngStream::derive(42, streams::field, 7);
  CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("normals have the right first moments") {
  RngStream s = RngStream::derive(1234, 50, 0);
  const int n = 200000;
  std::vector<double> x(n);
  for (auto& v : x) v = s.normal();
  const auto m = mean_stderr(x);
  CHECK(std::abs(m.mean) < 4 * m.stderr_);
  double s2 = 0;
  for (double v : x) s2 += v * v;
  s2 /= n;
  CHECK(s2 == doctest::Approx(1.0).epsilon(0.02));
  // tails: P(|Z| > 2) ~ 0.0455
  int tail = 0;
  for (double v : x)
    if (std::abs(v) > 2.0) ++tail;
  CHECK(static_cast<double>(tail) / n == doctest::Approx(0.0455).epsilon(0.1));
}

TEST_CASE("uniform01 stays inside (0,1)") {
  RngStream s = RngStream::derive(5, 51, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
