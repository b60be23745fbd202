#pragma once

#include <cstddef>
#include <vector>

#include "metaboot/types.hpp"

namespace metaboot {

struct WlsFit {
  double mu_delta = 0.0;
  std::vector<double> beta;
  double weighted_residual_ss = 0.0;
  double log_det_xtwx = 0.0;  // needed by the restricted likelihood
};

// Weighted least squares of the estimates on [1 | Z] with weights
// 1/(variance_j + tau2).
WlsFit wls_fixed_effects(const MetaDataset& dataset, double tau2);

// Marginal log-likelihood at explicit coefficients (not profiled):
// -1/2 sum_j [ log(2 pi v_j) + (x_j - mu - Z_j beta)^2 / v_j ],  v_j = s2_j + tau2.
double log_likelihood(const MetaDataset& dataset, double mu_delta,
                      const std::vector<double>& beta, double tau2);

// Restricted log-likelihood with coefficients profiled out:
// -1/2 sum log v_j - 1/2 log det(X'WX) - 1/2 rss_w - (K-p)/2 log(2 pi).
double restricted_log_likelihood(const MetaDataset& dataset, double tau2);

// Maximize the chosen objective over tau2 in [lower_bound, U] with profiled
// fixed effects.  U starts at max(10 * var(x), 10 * max s2, lower_bound + 1)
// and doubles up to three times if the optimum presses against it; after
// that, NonConvergence.  When the boundary value is at least as good as the
// interior optimum, tau2 is exactly lower_bound.
ModelFit fit(const MetaDataset& dataset, FitMethod method,
             double lower_bound = 0.0);

// Weighted residual SS at tau2 = 0; df = K-1, or K-P-1 with covariates.
QResult q_statistic(const MetaDataset& dataset);

struct HeterogeneityIndexes {
  double i2 = 0.0;  // (Q - df)/Q clamped to [0, 1]
  double h = 0.0;   // Q/df
};

// Descriptive indexes for the plain (covariate-free) analysis.
HeterogeneityIndexes heterogeneity_indexes(const MetaDataset& dataset);

namespace detail {

// Intercept-only fast path over raw arrays; the bootstrap hot loop.
struct PlainFit {
  double tau2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Negative profiled objective (ML or restricted) for intercept-only data.
double plain_negloglik(const double* x, const double* v, std::size_t k,
                       FitMethod method, double tau2);

// Bounded maximization with the same upper-limit/restart policy as fit();
// upper_hint = 0 means derive U from the data.  Throws non_convergence.
PlainFit fit_tau2_plain(const double* x, const double* v, std::size_t k,
                        FitMethod method, double lower_bound,
                        double upper_hint = 0.0);

}  // namespace detail

}  // namespace metaboot
