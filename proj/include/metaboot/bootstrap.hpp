#pragma once

#include <cstdint>
#include <vector>

#include "metaboot/rng.hpp"
#include "metaboot/stat_tests.hpp"
#include "metaboot/types.hpp"

namespace metaboot {

enum class StatKind { ml_lrt, reml_lrt, q };

const char* stat_kind_name(StatKind k) noexcept;  // "b_ml_lrt" etc.

struct BootstrapConfig {
  StatKind stat_kind = StatKind::reml_lrt;
  double lambda = 0.0;     // null dispersion level
  std::size_t n_rep = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int workers = 0;         // 0 = METABOOT_WORKERS / hardware
};

struct NullStatSummary {
  std::size_t count = 0;
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

struct BootstrapOutcome {
  TestResult result;
  double empirical_p = 1.0;
  double critical_value_boot = 0.0;
  NullStatSummary null_statistics;
  std::size_t clamped_count = 0;  // replicates whose tau2_hat fell below lambda
  std::size_t dropped_count = 0;  // replicates abandoned after failed refits
  double tau2_original = 0.0;     // free REML estimate on the input data
};

// One synthetic dataset under H0: tau2 = lambda.  Location parameters come
// from the free REML fit; each synthetic estimate is drawn from
// Normal(mu + Z_j beta, lambda + s2_j) and keeps the original study's
// sampling variance — except log odds ratios, where one of the four cells
// (chosen uniformly) is rebuilt from the drawn estimate and the variance is
// recomputed from the updated table.
MetaDataset simulate_null_effects(const ModelFit& fit, const MetaDataset& dataset,
                                  double lambda, Rng& rng);

// The full resampling test.  Deterministic given (dataset, config): replicate
// i derives its RNG stream from (config.seed, i), so any worker count gives
// bit-identical results.
BootstrapOutcome bootstrap_test(const MetaDataset& dataset,
                                const BootstrapConfig& config);

// Order-statistic quantile: element ceil(q*n) (1-based) of the ascending sort.
double empirical_quantile(const std::vector<double>& values, double q);

}  // namespace metaboot
