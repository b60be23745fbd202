#include "metaboot/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace metaboot {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Lower series: P(a,x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n)).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper continued fraction (Lentz): Q(a,x) = x^a e^-x / Gamma(a) * CF.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x))
    throw std::domain_error("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x))
    throw std::domain_error("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi_square_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_quantile_upper(double q, double df) {
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("chi_square_quantile_upper: q outside (0,1)");
  // Wilson-Hilferty start, then bisection-safeguarded Newton on the sf.
  double z;  // standard normal upper quantile of q, Moro-style rational fit
  {
    double p = 1.0 - q;
    double t = std::sqrt(-2.0 * std::log(p < 0.5 ? p : 1.0 - p));
    z = t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t));
    if (p < 0.5) z = -z;
  }
  double g = 2.0 / (9.0 * df);
  double x = df * std::pow(1.0 - g + z * std::sqrt(g), 3.0);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  if (!(x > 0.0) || !std::isfinite(x)) x = df;
  for (int it = 0; it < 200; ++it) {
    double f = chi_square_sf(x, df) - q;
    if (f > 0.0)
      lo = x;
    else
      hi = x;
    // density of chi-square at x
    double logpdf = (0.5 * df - 1.0) * std::log(x) - 0.5 * x -
                    std::lgamma(0.5 * df) - 0.5 * df * std::log(2.0);
    double step = f / std::exp(logpdf);  // sf' = -pdf
    double next = x + step;
    if (!(next > lo) || !(next < hi))
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
    if (std::fabs(next - x) < 1e-12 * (1.0 + x)) return next;
    x = next;
  }
  return x;
}

double mixture_sf(double t) {
  if (t <= 0.0) return t == 0.0 ? 0.5 : 1.0;
  return 0.5 * chi_square_sf(t, 1.0);
}

double mixture_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("mixture_critical: alpha outside (0,1)");
  if (alpha >= 0.5) return 0.0;
  return chi_square_quantile_upper(2.0 * alpha, 1.0);
}

}  // namespace metaboot
