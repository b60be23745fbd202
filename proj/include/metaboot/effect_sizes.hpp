#pragma once

#include "metaboot/types.hpp"

namespace metaboot {

// Standardized mean difference from group summaries.  Pools the two SDs,
// applies the small-sample bias correction 1 - 3/(4(n1+n2)-9), and uses the
// corrected estimate inside the variance formula.
StudyEffect smd_from_summary(double n1, double n2, double mean1, double mean2,
                             double sd1, double sd2);

// Pre-computed standardized mean difference; adjust=true treats `est` as the
// uncorrected value and applies the same bias correction.
StudyEffect smd_from_estimate(double n1, double n2, double est, bool adjust);

// The bias-correction factor itself, in (0,1) for all valid sizes.
double smd_correction_factor(double n1, double n2);
double smd_variance(double n1, double n2, double d);

// Fisher's variance-stabilizing transform of a Pearson correlation;
// variance 1/(n-3).
StudyEffect fisher_z(double r, double n);

// Log odds ratio of a 2x2 table (rows = groups, columns = outcome).  When any
// cell is zero, 0.5 is added to all four cells before anything is computed.
// Cells are accepted as non-negative reals; integrality is not required.
StudyEffect log_odds_ratio(double n00, double n01, double n10, double n11);

// Sum of reciprocal cells; the sampling variance given already-corrected
// (all-positive) cells.  Exposed for the bootstrap's cell rebuilding.
double log_or_variance(double n00, double n01, double n10, double n11);

}  // namespace metaboot
