#include <cmath>
#include <variant>

#include "doctest.h"
#include "metaboot/effect_sizes.hpp"

using namespace metaboot;

TEST_CASE("standardized mean difference from summaries, hand example") {
  StudyEffect s = smd_from_summary(10, 10, 1.0, 0.0, 1.0, 1.0);
  CHECK(s.kind == EffectKind::smd);
  CHECK(s.estimate == doctest::Approx(0.957746).epsilon(1e-6));
  CHECK(s.variance == doctest::Approx(0.222932).epsilon(1e-5));
  const SmdRaw& raw = std::get<SmdRaw>(s.raw);
  CHECK(raw.n1 == 10);
  CHECK(raw.n2 == 10);
}

TEST_CASE("bias correction factor and its application to precomputed values") {
  CHECK(smd_correction_factor(12, 12) == doctest::Approx(1.0 - 3.0 / 87.0));
  StudyEffect adj = smd_from_estimate(12, 12, 0.5, true);
  CHECK(adj.estimate == doctest::Approx(0.482759).epsilon(1e-6));
  StudyEffect plain = smd_from_estimate(12, 12, 0.5, false);
  CHECK(plain.estimate == 0.5);
  // the variance uses the (possibly corrected) estimate itself
  CHECK(plain.variance ==
        doctest::Approx(smd_variance(12, 12, 0.5)).epsilon(1e-15));
  CHECK(adj.variance ==
        doctest::Approx(smd_variance(12, 12, adj.estimate)).epsilon(1e-15));
  for (double n : {4.0, 7.0, 20.0, 500.0}) {
    double j = smd_correction_factor(n, n);
    CHECK(j > 0.0);
    CHECK(j < 1.0);
  }
}

TEST_CASE("standardized mean difference rejects degenerate inputs") {
  CHECK_THROWS_AS(smd_from_summary(1, 10, 0, 0, 1, 1), error);
  CHECK_THROWS_AS(smd_from_summary(10, 1, 0, 0, 1, 1), error);
  CHECK_THROWS_AS(smd_from_summary(10, 10, 0, 0, 0, 0), error);
  CHECK_THROWS_AS(smd_from_estimate(2, 1, 0.3, false), error);
  try {
    smd_from_summary(10, 10, 0, 0, 0, 0);
  } catch (const error& e) {
    CHECK(e.code() == errc::degenerate_spread);
  }
  try {
    smd_from_summary(1, 10, 0, 0, 1, 1);
  } catch (const error& e) {
    CHECK(e.code() == errc::invalid_count);
  }
}

TEST_CASE("Fisher transform, hand example and domain checks") {
  StudyEffect s = fisher_z(0.5, 103);
  CHECK(s.kind == EffectKind::fisher_z);
  CHECK(s.estimate == doctest::Approx(0.549306).epsilon(1e-6));
  CHECK(s.variance == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(std::get<CorRaw>(s.raw).n == 103);
  CHECK(fisher_z(-0.3, 20).estimate == doctest::Approx(std::atanh(-0.3)));
  CHECK_THROWS_AS(fisher_z(1.0, 50), error);
  CHECK_THROWS_AS(fisher_z(-1.2, 50), error);
  CHECK_THROWS_AS(fisher_z(0.5, 3), error);
  try {
    fisher_z(1.0, 50);
  } catch (const error& e) {
    CHECK(e.code() == errc::boundary_correlation);
  }
}

TEST_CASE("log odds ratio, hand example") {
  StudyEffect s = log_odds_ratio(20, 10, 10, 20);
  CHECK(s.kind == EffectKind::log_or);
  CHECK(s.estimate == doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(s.variance == doctest::Approx(0.3).epsilon(1e-12));
  const OrRaw& raw = std::get<OrRaw>(s.raw);
  CHECK(raw.n00 == 20);
  CHECK(raw.n11 == 20);
}

TEST_CASE("zero cells pull the half-count correction into all four cells") {
  StudyEffect s = log_odds_ratio(0, 10, 10, 10);
  CHECK(s.estimate == doctest::Approx(-3.044522).epsilon(1e-6));
  CHECK(s.variance == doctest::Approx(2.285714).epsilon(1e-6));
  const OrRaw& raw = std::get<OrRaw>(s.raw);
  CHECK(raw.n00 == 0.5);  // raw stores the corrected table
  CHECK(raw.n01 == 10.5);
  CHECK(raw.n10 == 10.5);
  CHECK(raw.n11 == 10.5);
  // fractional cells are legal as-is
  CHECK(log_odds_ratio(1.5, 2.5, 3.5, 4.5).variance ==
        doctest::Approx(log_or_variance(1.5, 2.5, 3.5, 4.5)));
}

TEST_CASE("log odds ratio failure modes") {
  CHECK_THROWS_AS(log_odds_ratio(0, 0, 0, 0), error);
  CHECK_THROWS_AS(log_odds_ratio(-1, 5, 5, 5), error);
  try {
    log_odds_ratio(0, 0, 0, 0);
  } catch (const error& e) {
    CHECK(e.code() == errc::all_zero);
  }
  try {
    log_odds_ratio(5, -2, 5, 5);
  } catch (const error& e) {
    CHECK(e.code() == errc::invalid_count);
  }
}

TEST_CASE("variances stay positive across the operating range") {
  for (double n : {4.0, 12.0, 91.0, 1000.0})
    for (double d : {-2.0, 0.0, 0.5, 3.0})
      CHECK(smd_variance(n, n, d) > 0.0);
  CHECK(log_or_variance(0.5, 0.5, 0.5, 0.5) == doctest::Approx(8.0));
}
