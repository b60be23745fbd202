#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "metaboot/errors.hpp"

namespace metaboot {

enum class EffectKind { smd, fisher_z, log_or };

const char* effect_kind_name(EffectKind k) noexcept;
EffectKind effect_kind_from_name(const std::string& name);

// Raw inputs an effect size was computed from.  Kept alongside the estimate
// because the log-odds-ratio bootstrap has to rebuild synthetic 2x2 tables.
struct SmdRaw {
  double n1 = 0, n2 = 0;
};
struct CorRaw {
  double n = 0;
};
struct OrRaw {
  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};
using RawData = std::variant<std::monostate, SmdRaw, CorRaw, OrRaw>;

struct StudyEffect {
  EffectKind kind = EffectKind::smd;
  double estimate = 0.0;
  double variance = 0.0;  // > 0 always
  RawData raw;
};

// A meta-analytic dataset: K studies, optionally a K x P covariate matrix
// (row-major).  The fixed-effect design is [1 | Z].
struct MetaDataset {
  std::vector<StudyEffect> studies;
  std::vector<double> covariates;  // K*P, row-major; empty when P == 0
  std::size_t n_covariates = 0;

  std::size_t k() const noexcept { return studies.size(); }
  std::size_t p() const noexcept { return n_covariates; }
  double z(std::size_t study, std::size_t j) const {
    return covariates[study * n_covariates + j];
  }
  void validate() const;  // throws empty_dataset / bad_config
};

enum class FitMethod { ml, reml };

const char* fit_method_name(FitMethod m) noexcept;

struct ModelFit {
  FitMethod method = FitMethod::reml;
  double mu_delta = 0.0;
  std::vector<double> beta;  // empty without covariates
  double tau2 = 0.0;
  double lower_bound = 0.0;
  double loglik_ml = 0.0;    // both likelihoods evaluated at the fitted point
  double loglik_reml = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct QResult {
  double q = 0.0;
  std::size_t df = 0;
};

}  // namespace metaboot
