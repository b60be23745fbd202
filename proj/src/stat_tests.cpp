#include "metaboot/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "metaboot/special_functions.hpp"

namespace metaboot {

TestResult q_test(const MetaDataset& ds, double alpha) {
  QResult qr = q_statistic(ds);
  TestResult out;
  out.test_name = "q";
  out.statistic = qr.q;
  out.df = qr.df;
  out.alpha = alpha;
  out.p_value = chi_square_sf(qr.q, static_cast<double>(qr.df));
  out.critical_value =
      chi_square_quantile_upper(alpha, static_cast<double>(qr.df));
  out.reject = qr.q > out.critical_value;
  return out;
}

namespace detail {

LrStat lr_statistic(const MetaDataset& ds, FitMethod method, double lambda) {
  ds.validate();
  ModelFit full = fit(ds, method, 0.0);
  LrStat out;
  out.tau2_hat = full.tau2;
  if (full.tau2 < lambda) return out;  // estimate below the null: count as 0

  double ll_full, ll_null;
  if (method == FitMethod::ml) {
    ll_full = full.loglik_ml;
    WlsFit at_null = wls_fixed_effects(ds, lambda);
    ll_null = log_likelihood(ds, at_null.mu_delta, at_null.beta, lambda);
  } else {
    ll_full = full.loglik_reml;
    ll_null = restricted_log_likelihood(ds, lambda);
  }
  out.statistic = std::max(0.0, 2.0 * (ll_full - ll_null));
  return out;
}

}  // namespace detail

TestResult lr_test(const MetaDataset& ds, FitMethod method, double alpha) {
  detail::LrStat s = detail::lr_statistic(ds, method, 0.0);
  TestResult out;
  out.test_name = method == FitMethod::ml ? "ml_lrt" : "reml_lrt";
  out.statistic = s.statistic;
  out.alpha = alpha;
  out.p_value = mixture_sf(s.statistic);
  out.critical_value = mixture_critical(alpha);
  out.reject = s.statistic > out.critical_value;
  return out;
}

}  // namespace metaboot
