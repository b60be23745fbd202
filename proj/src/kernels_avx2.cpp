#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "metaboot/kernels.hpp"

// AVX2+FMA builds of the likelihood kernels.  Compiled only on x86-64 with
// -mavx2 -mfma; selected at runtime after a cpuid check.

namespace metaboot {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// Four-lane log on positive normal doubles, Cephes reduction: split into
// mantissa m in [sqrt(1/2), sqrt(2)) and exponent e, evaluate the rational
// approximation of log(1+z) at z = m-1, recombine with e*log 2 split into
// high/low parts.  Agrees with libm log to a few ulp on the inputs the
// kernels see (variances, strictly positive and far from the subnormal
// range); the equivalence suite checks exactly that.
inline __m256d log4(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  __m256i bits = _mm256_castpd_si256(x);
  // biased exponent -> e; rebuild mantissa with exponent of 0.5
  __m256i expo = _mm256_srli_epi64(bits, 52);
  expo = _mm256_and_si256(expo, _mm256_set1_epi64x(0x7FF));
  __m256i mant_bits = _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL));
  mant_bits = _mm256_or_si256(mant_bits, _mm256_set1_epi64x(0x3FE0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);

  // e as double, via the low 32 bits of each lane (exponent fits easily)
  __m256i e_i64 = _mm256_sub_epi64(expo, _mm256_set1_epi64x(1022));
  alignas(32) int64_t e_arr[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(e_arr), e_i64);
  __m256d e = _mm256_set_pd(static_cast<double>(e_arr[3]), static_cast<double>(e_arr[2]),
                            static_cast<double>(e_arr[1]), static_cast<double>(e_arr[0]));

  // if m < sqrt(1/2): m *= 2, e -= 1
  const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
  __m256d below = _mm256_cmp_pd(m, sqrth, _CMP_LT_OQ);
  m = _mm256_add_pd(m, _mm256_and_pd(below, m));
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));

  __m256d z = _mm256_sub_pd(m, one);
  __m256d z2 = _mm256_mul_pd(z, z);

  // rational minimax for log(1+z) - z + z^2/2 over the reduced range
  __m256d p = _mm256_set1_pd(1.01875663804580931796e-4);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.97494994976747001425e-1));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.70579119878881725854e0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.44989225341610930846e1));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.79368678507819816313e1));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(7.70838733755885391666e0));
  __m256d q = z;
  q = _mm256_add_pd(q, _mm256_set1_pd(1.12873587189167450590e1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(4.52279145837532221105e1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(8.29875266912776603211e1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(7.11544750618563894466e1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.31251620126765340583e1));

  __m256d y = _mm256_mul_pd(_mm256_mul_pd(z, z2), _mm256_div_pd(p, q));
  // recombine: z - z^2/2 + y + e*ln2, with ln2 = 0.693359375 - 2.1219444e-4
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(half, z2, y);
  __m256d r = _mm256_add_pd(z, y);
  r = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
  return r;
}

void weighted_sums_avx2(const double* x, const double* v, double tau2,
                        std::size_t n, double* sum_w, double* sum_wx) {
  const __m256d t = _mm256_set1_pd(tau2);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d sw = _mm256_setzero_pd();
  __m256d swx = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d w = _mm256_div_pd(one, _mm256_add_pd(_mm256_loadu_pd(v + i), t));
    sw = _mm256_add_pd(sw, w);
    swx = _mm256_fmadd_pd(w, _mm256_loadu_pd(x + i), swx);
  }
  double a = hsum(sw), b = hsum(swx);
  for (; i < n; ++i) {
    double w = 1.0 / (v[i] + tau2);
    a += w;
    b += w * x[i];
  }
  *sum_w = a;
  *sum_wx = b;
}

double weighted_rss_avx2(const double* x, const double* v, double tau2,
                         double mu, std::size_t n) {
  const __m256d t = _mm256_set1_pd(tau2);
  const __m256d m = _mm256_set1_pd(mu);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
    __m256d d = _mm256_add_pd(_mm256_loadu_pd(v + i), t);
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_mul_pd(r, r), d));
  }
  double a = hsum(acc);
  for (; i < n; ++i) {
    double r = x[i] - mu;
    a += r * r / (v[i] + tau2);
  }
  return a;
}

double sum_log_variance_avx2(const double* v, double tau2, std::size_t n) {
  const __m256d t = _mm256_set1_pd(tau2);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, log4(_mm256_add_pd(_mm256_loadu_pd(v + i), t)));
  double a = hsum(acc);
  for (; i < n; ++i) a += std::log(v[i] + tau2);
  return a;
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{"avx2", weighted_sums_avx2, weighted_rss_avx2,
                         sum_log_variance_avx2};
  return &k;
}

}  // namespace metaboot
