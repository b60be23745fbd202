#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace metaboot {

// splitmix64 step; the workhorse for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic per-(stream, substream) seed under one root seed.  Replicate
// i of a bootstrap run uses derive_seed(seed, i), replication r of a
// simulation derives nested seeds, and so on.  Scheduling order can never
// change the draws a unit of work sees.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
  std::uint64_t s = root;
  (void)splitmix64(s);
  s ^= 0xD1B54A32D192ED03ull * (stream + 1);
  (void)splitmix64(s);
  s ^= 0x8BB84B93962EACC9ull * (substream + 1);
  return splitmix64(s);
}

// mt19937_64 core with hand-rolled variate transforms.  The standard library
// fixes the engine's output sequence but not the distributions', so uniform,
// normal, and binomial are implemented here to keep results identical across
// standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1) with 53 random bits
  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

  // unbiased integer in [0, bound)
  std::uint64_t uniform_below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = gen_();
      if (r >= threshold) return r % bound;
    }
  }

  // standard normal via the polar method, spare value cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Binomial(n, p) by inversion for small means, waiting-time counting for
  // large ones.  Both paths are exact and O(n*p); no normal approximation.
  long binomial(long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    bool flipped = p > 0.5;
    double q = flipped ? 1.0 - p : p;
    long draw;
    if (static_cast<double>(n) * q < 30.0) {
      // cdf walk from pmf(0) = (1-q)^n
      double pmf = std::exp(static_cast<double>(n) * std::log1p(-q));
      double cdf = pmf;
      double u = uniform01();
      long k = 0;
      double odds = q / (1.0 - q);
      while (u > cdf && k < n) {
        pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        cdf += pmf;
        ++k;
      }
      draw = k;
    } else {
      // count successes via geometric waiting times between them
      double log1mq = std::log1p(-q);
      long k = 0;
      long pos = 0;
      for (;;) {
        double u = uniform01();
        pos += static_cast<long>(std::floor(std::log(1.0 - u) / log1mq)) + 1;
        if (pos > n) break;
        ++k;
      }
      draw = k;
    }
    return flipped ? n - draw : draw;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace metaboot
