#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metaboot/bootstrap.hpp"
#include "metaboot/rng.hpp"
#include "metaboot/types.hpp"

namespace metaboot {

// Which tests a Monte Carlo cell evaluates.
enum class TestSelect { q, ml_lrt, reml_lrt, b_q, b_ml_lrt, b_reml_lrt };

const char* test_select_name(TestSelect t) noexcept;
TestSelect test_select_from_name(const std::string& name);
bool test_select_is_bootstrap(TestSelect t) noexcept;

struct SimulationConfig {
  EffectKind kind = EffectKind::smd;
  std::size_t k_studies = 10;
  std::vector<double> size_pool;  // per-group sizes; one entry = fixed size
  double mu_delta = 0.0;
  double tau2_true = 0.0;
  std::size_t n_covariates = 0;  // 0, 1, or 3 in the study designs
  double beta_value = 0.5;
  double lambda_null = 0.0;
  std::vector<TestSelect> stat_kinds;
  std::size_t n_replications = 1000;
  BootstrapConfig bootstrap;  // n_rep/alpha template for the b_* tests
  std::uint64_t seed = 0;
  int workers = 0;

  void validate() const;
};

struct RateEntry {
  TestSelect test = TestSelect::q;
  double rejection_rate = 0.0;
  double mc_se = 0.0;  // sqrt(p(1-p)/valid)
  std::size_t rejections = 0;
  std::size_t valid = 0;
};

struct SimulationResult {
  std::string label;
  std::vector<RateEntry> rates;
  double nonconvergence_rate = 0.0;
  double elapsed_seconds = 0.0;
  std::size_t n_replications = 0;
};

// One synthetic meta-analysis drawn from the generating model: per-study
// sizes from the pool, covariates and true effects from normals, then raw
// data at the chosen effect family's level (group normals for standardized
// mean differences, bivariate pairs for correlations, two row binomials for
// 2x2 tables).
MetaDataset generate_dataset(const SimulationConfig& config, Rng& rng);

// R independent replications, each dataset put through every configured test;
// deterministic under (seed, any worker count).
SimulationResult run_rejection_study(const SimulationConfig& config);

struct TableLayout {
  std::vector<TestSelect> columns;
};

// Rates rendered "0.xxx (0.xxx)"; zero-ish standard errors print "<0.001".
std::string render_results_table(const std::vector<SimulationResult>& results,
                                 const TableLayout& layout);

}  // namespace metaboot
