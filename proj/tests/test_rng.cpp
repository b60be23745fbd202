#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "metaboot/rng.hpp"

using namespace metaboot;

TEST_CASE("identical seeds replay identical sequences") {
  Rng a(42), b(42);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(42), d(42);
  for (int i = 0; i < 50; ++i) {
    CHECK(c.uniform01() == d.uniform01());
    CHECK(c.normal() == d.normal());
    CHECK(c.binomial(40, 0.3) == d.binomial(40, 0.3));
  }
}

TEST_CASE("seed derivation separates streams and substreams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 40; ++stream)
    for (std::uint64_t sub = 0; sub < 4; ++sub)
      seen.insert(derive_seed(7, stream, sub));
  CHECK(seen.size() == 160);  // no collisions in a small block
  CHECK(derive_seed(7, 1, 0) != derive_seed(8, 1, 0));
  CHECK(derive_seed(7, 1) == derive_seed(7, 1, 0));
  // first draws of neighboring streams decorrelate
  Rng r0(derive_seed(7, 0)), r1(derive_seed(7, 1));
  CHECK(r0.next_u64() != r1.next_u64());
}

TEST_CASE("uniform01 lies in [0,1) with the right first moments") {
  Rng rng(3);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("uniform_below covers its range without bias") {
  Rng rng(5);
  long counts[7] = {0};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    std::uint64_t v = rng.uniform_below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (long c : counts)
    CHECK(static_cast<double>(c) / n == doctest::Approx(1.0 / 7.0).epsilon(0.05));
}

TEST_CASE("normal moments and tail behavior") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0, sum2 = 0, sum3 = 0, sum4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sum2 += z * z;
    sum3 += z * z * z;
    sum4 += z * z * z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02).scale(1.0));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sum3 / n == doctest::Approx(0.0).epsilon(0.05).scale(1.0));
  CHECK(sum4 / n == doctest::Approx(3.0).epsilon(0.05));
  // location-scale wrapper
  Rng a(13), b(13);
  for (int i = 0; i < 10; ++i)
    CHECK(a.normal(2.0, 3.0) == doctest::Approx(2.0 + 3.0 * b.normal()));
}

TEST_CASE("binomial edge cases are exact") {
  Rng rng(17);
  CHECK(rng.binomial(10, 0.0) == 0);
  CHECK(rng.binomial(10, 1.0) == 10);
  CHECK(rng.binomial(0, 0.5) == 0);
  CHECK(rng.binomial(-3, 0.5) == 0);
  for (int i = 0; i < 100; ++i) {
    long v = rng.binomial(1, 0.5);
    CHECK(v >= 0);
    CHECK(v <= 1);
  }
}

TEST_CASE("binomial matches exact probabilities, small n") {
  Rng rng(19);
  // n=3, p=0.4: pmf = {0.216, 0.432, 0.288, 0.064}
  const double pmf[4] = {0.216, 0.432, 0.288, 0.064};
  long counts[4] = {0};
  const int n = 120000;
  for (int i = 0; i < n; ++i) {
    long v = rng.binomial(3, 0.4);
    REQUIRE(v >= 0);
    REQUIRE(v <= 3);
    ++counts[v];
  }
  for (int k = 0; k < 4; ++k)
    CHECK(static_cast<double>(counts[k]) / n ==
          doctest::Approx(pmf[k]).epsilon(0.04));
}

TEST_CASE("binomial large-count path keeps the right mean and variance") {
  Rng rng(23);
  // n*q above the path switch in both directions, including a flipped p
  for (double p : {0.35, 0.65}) {
    const long trials = 400;
    const int n = 30000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      long v = rng.binomial(trials, p);
      REQUIRE(v >= 0);
      REQUIRE(v <= trials);
      sum += static_cast<double>(v);
      sum2 += static_cast<double>(v) * static_cast<double>(v);
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(trials * p).epsilon(0.005));
    CHECK(var == doctest::Approx(trials * p * (1 - p)).epsilon(0.06));
  }
}
