#include <atomic>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "metaboot/errors.hpp"
#include "metaboot/kernels.hpp"
#include "metaboot/parallel.hpp"
#include "metaboot/types.hpp"

namespace metaboot {

const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::invalid_count: return "invalid_count";
    case errc::degenerate_spread: return "degenerate_spread";
    case errc::boundary_correlation: return "boundary_correlation";
    case errc::all_zero: return "all_zero";
    case errc::missing_raw: return "missing_raw";
    case errc::singular_design: return "singular_design";
    case errc::non_convergence: return "non_convergence";
    case errc::empty_input: return "empty_input";
    case errc::empty_dataset: return "empty_dataset";
    case errc::schema_error: return "schema_error";
    case errc::row_error: return "row_error";
    case errc::degenerate_sample: return "degenerate_sample";
    case errc::bad_config: return "bad_config";
  }
  return "unknown";
}

const char* effect_kind_name(EffectKind k) noexcept {
  switch (k) {
    case EffectKind::smd: return "smd";
    case EffectKind::fisher_z: return "fcor";
    case EffectKind::log_or: return "lnor";
  }
  return "unknown";
}

const char* fit_method_name(FitMethod m) noexcept {
  return m == FitMethod::ml ? "ml" : "reml";
}

EffectKind effect_kind_from_name(const std::string& name) {
  if (name == "smd") return EffectKind::smd;
  if (name == "fcor") return EffectKind::fisher_z;
  if (name == "lnor") return EffectKind::log_or;
  fail(errc::bad_config, "unknown effect family '" + name + "'");
}

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(METABOOT_HAVE_AVX2)
// library built without the AVX2 translation unit
const Kernels* avx2_unavailable() { return nullptr; }
#endif

const Kernels* avx2_if_usable() {
#if defined(METABOOT_HAVE_AVX2)
  return cpu_has_avx2() ? avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* resolve_default() {
  if (const char* env = std::getenv("METABOOT_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (std::strcmp(env, "avx2") == 0) {
      if (const Kernels* k = avx2_if_usable()) return k;
      fail(errc::bad_config, "METABOOT_KERNEL=avx2 but AVX2 is unavailable");
    }
    if (std::strcmp(env, "auto") != 0 && *env != '\0')
      fail(errc::bad_config,
           std::string("METABOOT_KERNEL='") + env + "' is not scalar|avx2|auto");
  }
  if (const Kernels* k = avx2_if_usable()) return k;
  return &scalar_kernels();
}

}  // namespace

#if !defined(METABOOT_HAVE_AVX2)
const Kernels* avx2_kernels() { return avx2_unavailable(); }
#endif

const Kernels& active_kernels() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = resolve_default();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

BackendKind active_backend() {
  const Kernels& k = active_kernels();
  return std::strcmp(k.name, "avx2") == 0 ? BackendKind::avx2
                                          : BackendKind::scalar;
}

void set_backend(BackendKind kind) {
  switch (kind) {
    case BackendKind::automatic:
      g_active.store(resolve_default(), std::memory_order_release);
      return;
    case BackendKind::scalar:
      g_active.store(&scalar_kernels(), std::memory_order_release);
      return;
    case BackendKind::avx2:
      if (const Kernels* k = avx2_if_usable()) {
        g_active.store(k, std::memory_order_release);
        return;
      }
      fail(errc::bad_config, "AVX2 backend not available on this machine");
  }
}

int default_workers() {
  if (const char* env = std::getenv("METABOOT_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

int resolve_workers(int requested) {
  return requested >= 1 ? requested : default_workers();
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  std::size_t w = static_cast<std::size_t>(resolve_workers(workers));
  if (w > n) w = n;
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      std::size_t lo = n * t / w, hi = n * (t + 1) / w;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void MetaDataset::validate() const {
  if (studies.size() < 2)
    fail(errc::empty_dataset, "need at least 2 studies, got " +
                                  std::to_string(studies.size()));
  if (n_covariates > 0) {
    if (covariates.size() != studies.size() * n_covariates)
      fail(errc::bad_config, "covariate matrix shape mismatch");
    if (studies.size() <= n_covariates + 1)
      fail(errc::bad_config, "need K > P + 1 for positive residual df");
  }
  for (std::size_t i = 0; i < studies.size(); ++i) {
    if (!(studies[i].variance > 0.0))
      fail(errc::bad_config,
           "study " + std::to_string(i + 1) + " has non-positive variance");
    if (studies[i].kind != studies[0].kind)
      fail(errc::bad_config, "studies mix effect kinds");
  }
}

}  // namespace metaboot
