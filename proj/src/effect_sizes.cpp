#include "metaboot/effect_sizes.hpp"

#include <cmath>
#include <string>

namespace metaboot {

double smd_correction_factor(double n1, double n2) {
  double denom = 4.0 * (n1 + n2) - 9.0;
  if (!(denom > 0.0))
    fail(errc::invalid_count, "bias correction undefined for n1+n2 <= 2.25");
  return 1.0 - 3.0 / denom;
}

double smd_variance(double n1, double n2, double d) {
  double nt = n1 + n2;
  return nt / (n1 * n2) + d * d / (2.0 * nt);
}

StudyEffect smd_from_summary(double n1, double n2, double mean1, double mean2,
                             double sd1, double sd2) {
  if (!(n1 >= 2.0) || !(n2 >= 2.0))
    fail(errc::invalid_count, "group sizes must both be >= 2");
  double pooled_var =
      ((n1 - 1.0) * sd1 * sd1 + (n2 - 1.0) * sd2 * sd2) / (n1 + n2 - 2.0);
  if (!(pooled_var > 0.0))
    fail(errc::degenerate_spread, "pooled variance is zero");
  double g = (mean1 - mean2) / std::sqrt(pooled_var);
  double d = smd_correction_factor(n1, n2) * g;
  return {EffectKind::smd, d, smd_variance(n1, n2, d), SmdRaw{n1, n2}};
}

StudyEffect smd_from_estimate(double n1, double n2, double est, bool adjust) {
  if (!(n1 >= 2.0) || !(n2 >= 2.0))
    fail(errc::invalid_count, "group sizes must both be >= 2");
  double d = adjust ? smd_correction_factor(n1, n2) * est : est;
  return {EffectKind::smd, d, smd_variance(n1, n2, d), SmdRaw{n1, n2}};
}

StudyEffect fisher_z(double r, double n) {
  if (!(std::fabs(r) < 1.0))
    fail(errc::boundary_correlation, "correlation " + std::to_string(r) +
                                         " is outside (-1, 1)");
  if (!(n > 3.0))
    fail(errc::invalid_count, "need n > 3 for a positive variance");
  double z = 0.5 * std::log((1.0 + r) / (1.0 - r));
  return {EffectKind::fisher_z, z, 1.0 / (n - 3.0), CorRaw{n}};
}

double log_or_variance(double n00, double n01, double n10, double n11) {
  return 1.0 / n00 + 1.0 / n01 + 1.0 / n10 + 1.0 / n11;
}

StudyEffect log_odds_ratio(double n00, double n01, double n10, double n11) {
  if (n00 < 0.0 || n01 < 0.0 || n10 < 0.0 || n11 < 0.0)
    fail(errc::invalid_count, "negative cell count");
  if (n00 == 0.0 && n01 == 0.0 && n10 == 0.0 && n11 == 0.0)
    fail(errc::all_zero, "empty 2x2 table");
  if (n00 == 0.0 || n01 == 0.0 || n10 == 0.0 || n11 == 0.0) {
    n00 += 0.5;
    n01 += 0.5;
    n10 += 0.5;
    n11 += 0.5;
  }
  double est = std::log(n00 * n11 / (n01 * n10));
  return {EffectKind::log_or, est, log_or_variance(n00, n01, n10, n11),
          OrRaw{n00, n01, n10, n11}};
}

}  // namespace metaboot
