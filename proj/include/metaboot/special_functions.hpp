#pragma once

#include <cstddef>

namespace metaboot {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
// Series expansion for x < a+1, continued fraction otherwise; absolute
// accuracy better than 1e-12 for a in [0.5, 250] (df up to 500).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail P(X >= x) for X ~ chi-square(df).  df need not be integral.
double chi_square_sf(double x, double df);
double chi_square_cdf(double x, double df);

// Upper-tail quantile: the x with chi_square_sf(x, df) == q.
double chi_square_quantile_upper(double q, double df);

// Tail of the boundary reference 0.5*chi2(0) + 0.5*chi2(1): the probability
// that the mixture exceeds t.  Carries the point mass at zero, so the value
// at t = 0 is 0.5 and no statistic can have a smaller tail than 0.
double mixture_sf(double t);

// Critical value c with mixture_sf(c) == alpha; 0 when alpha >= 0.5.
double mixture_critical(double alpha);

}  // namespace metaboot
