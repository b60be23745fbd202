#include <cmath>
#include <cstddef>

#include "metaboot/kernels.hpp"

namespace metaboot {

namespace {

void weighted_sums_scalar(const double* x, const double* v, double tau2,
                          std::size_t n, double* sum_w, double* sum_wx) {
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0 / (v[i] + tau2);
    sw += w;
    swx += w * x[i];
  }
  *sum_w = sw;
  *sum_wx = swx;
}

double weighted_rss_scalar(const double* x, const double* v, double tau2,
                           double mu, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = x[i] - mu;
    acc += r * r / (v[i] + tau2);
  }
  return acc;
}

double sum_log_variance_scalar(const double* v, double tau2, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::log(v[i] + tau2);
  return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", weighted_sums_scalar, weighted_rss_scalar,
                         sum_log_variance_scalar};
  return k;
}

}  // namespace metaboot
