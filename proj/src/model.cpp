#include "metaboot/model.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "metaboot/kernels.hpp"

namespace metaboot {

namespace {

constexpr double kLn2Pi = 1.8378770664093454836;
constexpr double kTau2Tol = 1e-10;  // absolute tolerance of the tau2 search

void gather(const MetaDataset& ds, std::vector<double>& x,
            std::vector<double>& v) {
  x.resize(ds.k());
  v.resize(ds.k());
  for (std::size_t i = 0; i < ds.k(); ++i) {
    x[i] = ds.studies[i].estimate;
    v[i] = ds.studies[i].variance;
  }
}

// Bounded Brent minimization (golden section with parabolic steps).
// Returns false when the iteration cap is hit before the interval shrinks.
template <class F>
bool brent_min(F&& f, double a, double b, double tol, int max_iter,
               double* xmin, int* iters) {
  constexpr double cgold = 0.3819660112501051;
  double x = a + cgold * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double m = 0.5 * (a + b);
    double tol1 = tol + 1e-12 * std::fabs(x);
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) {
      *xmin = x;
      *iters = it;
      return true;
    }
    bool parabolic = false;
    if (std::fabs(e) > tol1) {
      // try a parabola through (v,fv), (w,fw), (x,fx)
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      double e_old = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = cgold * e;
    }
    double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    double fu = f(u);
    if (fu <= fx) {
      if (u < x)
        b = x;
      else
        a = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  *xmin = x;
  *iters = max_iter;
  return false;
}

// Shared search-with-restarts: minimize nll over [lb, U], widening U whenever
// the optimum lands against it.
template <class F>
std::pair<double, int> maximize_over_tau2(F&& nll, double lower_bound,
                                          double upper0) {
  double upper = upper0;
  int total_iters = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    double xmin = lower_bound;
    int iters = 0;
    bool ok = brent_min(nll, lower_bound, upper, kTau2Tol, 200, &xmin, &iters);
    total_iters += iters;
    double press = 1e-6 * (1.0 + upper);
    if (ok && upper - xmin > press) {
      // exact boundary tie-break: the floor wins whenever it is as good
      if (nll(lower_bound) <= nll(xmin)) xmin = lower_bound;
      return {xmin, total_iters};
    }
    upper *= 2.0;
  }
  fail(errc::non_convergence,
       "tau2 search still pinned to the upper limit after 3 restarts");
}

double upper_limit(const double* x, const double* v, std::size_t k,
                   double lower_bound) {
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += x[i];
  mean /= static_cast<double>(k);
  double ss = 0.0, vmax = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ss += (x[i] - mean) * (x[i] - mean);
    if (v[i] > vmax) vmax = v[i];
  }
  double var = ss / static_cast<double>(k > 1 ? k - 1 : 1);
  return std::max({10.0 * var, 10.0 * vmax, lower_bound + 1.0});
}

}  // namespace

WlsFit wls_fixed_effects(const MetaDataset& ds, double tau2) {
  const std::size_t n = ds.k();
  const std::size_t q = ds.p() + 1;
  // normal equations A = X'WX, rhs = X'Wx, X = [1 | Z]
  std::vector<double> a(q * q, 0.0), rhs(q, 0.0), row(q);
  for (std::size_t j = 0; j < n; ++j) {
    double w = 1.0 / (ds.studies[j].variance + tau2);
    row[0] = 1.0;
    for (std::size_t c = 1; c < q; ++c) row[c] = ds.z(j, c - 1);
    for (std::size_t r = 0; r < q; ++r) {
      for (std::size_t c = r; c < q; ++c) a[r * q + c] += w * row[r] * row[c];
      rhs[r] += w * row[r] * ds.studies[j].estimate;
    }
  }
  // Cholesky A = LL' in the lower triangle
  double max_diag = 0.0;
  for (std::size_t r = 0; r < q; ++r) max_diag = std::max(max_diag, a[r * q + r]);
  double log_det = 0.0;
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      double s = a[c * q + r];  // upper triangle holds the accumulated A
      for (std::size_t t = 0; t < c; ++t) s -= a[r * q + t] * a[c * q + t];
      if (r == c) {
        if (!(s > 1e-12 * max_diag))
          fail(errc::singular_design, "weighted design matrix is rank-deficient");
        a[r * q + r] = std::sqrt(s);
        log_det += 2.0 * std::log(a[r * q + r]);
      } else {
        a[r * q + c] = s / a[c * q + c];
      }
    }
  }
  // solve LL' coef = rhs
  std::vector<double> coef(rhs);
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t t = 0; t < r; ++t) coef[r] -= a[r * q + t] * coef[t];
    coef[r] /= a[r * q + r];
  }
  for (std::size_t r = q; r-- > 0;) {
    for (std::size_t t = r + 1; t < q; ++t) coef[r] -= a[t * q + r] * coef[t];
    coef[r] /= a[r * q + r];
  }
  WlsFit out;
  out.mu_delta = coef[0];
  out.beta.assign(coef.begin() + 1, coef.end());
  out.log_det_xtwx = log_det;
  double rss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double fitted = coef[0];
    for (std::size_t c = 1; c < q; ++c) fitted += coef[c] * ds.z(j, c - 1);
    double r = ds.studies[j].estimate - fitted;
    rss += r * r / (ds.studies[j].variance + tau2);
  }
  out.weighted_residual_ss = rss;
  return out;
}

double log_likelihood(const MetaDataset& ds, double mu_delta,
                      const std::vector<double>& beta, double tau2) {
  double acc = 0.0;
  for (std::size_t j = 0; j < ds.k(); ++j) {
    double v = ds.studies[j].variance + tau2;
    double fitted = mu_delta;
    for (std::size_t c = 0; c < beta.size(); ++c) fitted += beta[c] * ds.z(j, c);
    double r = ds.studies[j].estimate - fitted;
    acc += std::log(2.0 * M_PI * v) + r * r / v;
  }
  return -0.5 * acc;
}

double restricted_log_likelihood(const MetaDataset& ds, double tau2) {
  WlsFit w = wls_fixed_effects(ds, tau2);
  double sum_log = 0.0;
  for (std::size_t j = 0; j < ds.k(); ++j)
    sum_log += std::log(ds.studies[j].variance + tau2);
  double kp = static_cast<double>(ds.k()) - static_cast<double>(ds.p() + 1);
  return -0.5 * (sum_log + w.log_det_xtwx + w.weighted_residual_ss +
                 kp * kLn2Pi);
}

namespace detail {

double plain_negloglik(const double* x, const double* v, std::size_t k,
                       FitMethod method, double tau2) {
  const Kernels& kn = active_kernels();
  double sw = 0.0, swx = 0.0;
  kn.weighted_sums(x, v, tau2, k, &sw, &swx);
  double mu = swx / sw;
  double rss = kn.weighted_rss(x, v, tau2, mu, k);
  double slog = kn.sum_log_variance(v, tau2, k);
  double dk = static_cast<double>(k);
  if (method == FitMethod::ml) return 0.5 * (dk * kLn2Pi + slog + rss);
  return 0.5 * ((dk - 1.0) * kLn2Pi + slog + std::log(sw) + rss);
}

PlainFit fit_tau2_plain(const double* x, const double* v, std::size_t k,
                        FitMethod method, double lower_bound,
                        double upper_hint) {
  double u0 = upper_hint > 0.0 ? upper_hint : upper_limit(x, v, k, lower_bound);
  auto nll = [&](double t) { return plain_negloglik(x, v, k, method, t); };
  auto [tau2, iters] = maximize_over_tau2(nll, lower_bound, u0);
  return {tau2, iters, true};
}

}  // namespace detail

ModelFit fit(const MetaDataset& ds, FitMethod method, double lower_bound) {
  ds.validate();
  if (!(lower_bound >= 0.0)) fail(errc::bad_config, "lower_bound must be >= 0");
  ModelFit out;
  out.method = method;
  out.lower_bound = lower_bound;
  if (ds.p() == 0) {
    std::vector<double> x, v;
    gather(ds, x, v);
    detail::PlainFit pf =
        detail::fit_tau2_plain(x.data(), v.data(), ds.k(), method, lower_bound);
    out.tau2 = pf.tau2;
    out.iterations = pf.iterations;
    out.converged = pf.converged;
  } else {
    std::vector<double> x, v;
    gather(ds, x, v);
    double u0 = upper_limit(x.data(), v.data(), ds.k(), lower_bound);
    auto nll = [&](double t) {
      if (method == FitMethod::reml) return -restricted_log_likelihood(ds, t);
      WlsFit w = wls_fixed_effects(ds, t);
      return -log_likelihood(ds, w.mu_delta, w.beta, t);
    };
    auto [tau2, iters] = maximize_over_tau2(nll, lower_bound, u0);
    out.tau2 = tau2;
    out.iterations = iters;
    out.converged = true;
  }
  WlsFit w = wls_fixed_effects(ds, out.tau2);
  out.mu_delta = w.mu_delta;
  out.beta = w.beta;
  out.loglik_ml = log_likelihood(ds, w.mu_delta, w.beta, out.tau2);
  out.loglik_reml = restricted_log_likelihood(ds, out.tau2);
  return out;
}

QResult q_statistic(const MetaDataset& ds) {
  ds.validate();
  WlsFit w = wls_fixed_effects(ds, 0.0);
  return {w.weighted_residual_ss, ds.k() - ds.p() - 1};
}

HeterogeneityIndexes heterogeneity_indexes(const MetaDataset& ds) {
  if (ds.p() != 0)
    fail(errc::bad_config,
         "descriptive indexes are defined for the covariate-free analysis");
  QResult qr = q_statistic(ds);
  double df = static_cast<double>(qr.df);
  HeterogeneityIndexes out;
  out.h = qr.q / df;
  out.i2 = qr.q > 0.0 ? std::max(0.0, (qr.q - df) / qr.q) : 0.0;
  return out;
}

}  // namespace metaboot
