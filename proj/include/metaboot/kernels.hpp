#pragma once

#include <cstddef>

namespace metaboot {

// Hot loops of the likelihood evaluations, isolated so a SIMD build can be
// swapped in at runtime.  All kernels read variances v[i] and an offset tau2
// and work with weights w_i = 1/(v_i + tau2).
//
// Accumulation order differs between backends (the AVX2 build keeps four
// partial sums), so cross-backend results agree to rounding, not bitwise.
// Within one backend everything is deterministic.
struct Kernels {
  const char* name;
  // sum_w = sum_i w_i, sum_wx = sum_i w_i * x_i
  void (*weighted_sums)(const double* x, const double* v, double tau2,
                        std::size_t n, double* sum_w, double* sum_wx);
  // sum_i w_i * (x_i - mu)^2
  double (*weighted_rss)(const double* x, const double* v, double tau2,
                         double mu, std::size_t n);
  // sum_i log(v_i + tau2)
  double (*sum_log_variance)(const double* v, double tau2, std::size_t n);
};

enum class BackendKind { automatic, scalar, avx2 };

// Active kernel set.  Resolved once on first use: METABOOT_KERNEL=scalar|avx2
// overrides, otherwise the best instruction set the CPU supports wins.
const Kernels& active_kernels();
BackendKind active_backend();

// Force a backend (test hook).  Throws bad_config when the requested backend
// is not available in this build/CPU.
void set_backend(BackendKind kind);

const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when unavailable

}  // namespace metaboot
