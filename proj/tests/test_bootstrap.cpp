#include <cmath>
#include <variant>
#include <vector>

#include "doctest.h"
#include "metaboot/bootstrap.hpp"
#include "metaboot/effect_sizes.hpp"
#include "metaboot/model.hpp"
#include "test_support.hpp"

using namespace metaboot;

namespace {

MetaDataset plain_dataset(const std::vector<double>& x,
                          const std::vector<double>& v) {
  MetaDataset ds;
  for (std::size_t i = 0; i < x.size(); ++i) {
    StudyEffect s;
    s.kind = EffectKind::smd;
    s.estimate = x[i];
    s.variance = v[i];
    ds.studies.push_back(s);
  }
  return ds;
}

MetaDataset or_dataset(double n00, double n01, double n10, double n11,
                       double variance_override) {
  MetaDataset ds;
  for (int i = 0; i < 2; ++i) {
    StudyEffect s;
    s.kind = EffectKind::log_or;
    s.estimate = std::log(n00 * n11 / (n01 * n10));
    s.variance = variance_override;
    s.raw = OrRaw{n00, n01, n10, n11};
    ds.studies.push_back(s);
  }
  return ds;
}

}  // namespace

TEST_CASE("order-statistic quantile, worked values and guards") {
  std::vector<double> v = {4, 1, 3, 2};  // sorting is the quantile's job
  CHECK(empirical_quantile(v, 0.5) == 2.0);
  CHECK(empirical_quantile(v, 0.25) == 1.0);
  CHECK(empirical_quantile(v, 0.251) == 2.0);
  CHECK(empirical_quantile(v, 0.75) == 3.0);
  CHECK(empirical_quantile(v, 0.76) == 4.0);
  CHECK(empirical_quantile(v, 0.999) == 4.0);
  CHECK(empirical_quantile({7.0}, 0.5) == 7.0);
  // ceil(0.95 * 2000) must be 1900 even though the product rounds up in fp
  std::vector<double> big;
  for (int i = 1; i <= 2000; ++i) big.push_back(i);
  CHECK(empirical_quantile(big, 0.95) == 1900.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), error);
  CHECK_THROWS_AS(empirical_quantile(v, 0.0), error);
  CHECK_THROWS_AS(empirical_quantile(v, 1.0), error);
}

TEST_CASE("synthetic null datasets keep variances, raw data, covariates") {
  Rng rng(31);
  MetaDataset ds = testsupport::make_random_dataset(rng, 6, 1);
  ModelFit f = fit(ds, FitMethod::reml);
  Rng sim(77);
  MetaDataset synth = simulate_null_effects(f, ds, 0.02, sim);
  REQUIRE(synth.k() == ds.k());
  CHECK(synth.p() == ds.p());
  CHECK(synth.covariates == ds.covariates);
  for (std::size_t j = 0; j < ds.k(); ++j) {
    CHECK(synth.studies[j].variance == ds.studies[j].variance);  // exact
    CHECK(synth.studies[j].kind == ds.studies[j].kind);
    CHECK(std::get<SmdRaw>(synth.studies[j].raw).n1 ==
          std::get<SmdRaw>(ds.studies[j].raw).n1);
    CHECK(synth.studies[j].estimate != ds.studies[j].estimate);
  }
}

TEST_CASE("synthetic draws center on the fitted mean structure") {
  // tight dispersion: every draw hugs mu + z*beta
  MetaDataset ds;
  ds.n_covariates = 1;
  for (int i = 0; i < 4; ++i) {
    StudyEffect s;
    s.estimate = 0.0;
    s.variance = 1e-12;
    ds.studies.push_back(s);
    ds.covariates.push_back(static_cast<double>(i));
  }
  ModelFit f;
  f.mu_delta = 0.7;
  f.beta = {0.25};
  Rng rng(5);
  MetaDataset synth = simulate_null_effects(f, ds, 0.0, rng);
  for (int i = 0; i < 4; ++i)
    CHECK(synth.studies[i].estimate ==
          doctest::Approx(0.7 + 0.25 * i).epsilon(1e-4));
}

TEST_CASE("log-odds-ratio replicates rebuild one cell to match the draw") {
  ModelFit f;
  f.mu_delta = std::log(4.0);
  bool saw_n01 = false;
  for (std::uint64_t seed = 0; seed < 60 && !saw_n01; ++seed) {
    Rng rng(seed);
    MetaDataset ds = or_dataset(10, 10, 10, 10, 1e-30);
    MetaDataset synth = simulate_null_effects(f, ds, 0.0, rng);
    for (std::size_t j = 0; j < synth.k(); ++j) {
      const OrRaw& c = std::get<OrRaw>(synth.studies[j].raw);
      double draw = synth.studies[j].estimate;
      // the table's log odds ratio reproduces the drawn value
      CHECK(std::log(c.n00 * c.n11 / (c.n01 * c.n10)) ==
            doctest::Approx(draw).epsilon(1e-12));
      // variance recomputed from the updated table
      CHECK(synth.studies[j].variance ==
            doctest::Approx(log_or_variance(c.n00, c.n01, c.n10, c.n11))
                .epsilon(1e-12));
      // exactly one cell moved
      int changed = (c.n00 != 10.0) + (c.n01 != 10.0) + (c.n10 != 10.0) +
                    (c.n11 != 10.0);
      CHECK(changed == 1);
      if (c.n01 != 10.0) {
        saw_n01 = true;  // worked example: n01' = n00*n11/(n10*e^x) = 2.5
        CHECK(c.n01 == doctest::Approx(2.5).epsilon(1e-9));
        CHECK(synth.studies[j].variance == doctest::Approx(0.7).epsilon(1e-9));
      }
    }
  }
  CHECK(saw_n01);
}

TEST_CASE("missing 2x2 cells stop the log-odds-ratio bootstrap") {
  MetaDataset ds = or_dataset(10, 10, 10, 10, 0.4);
  ds.studies[1].raw = std::monostate{};
  BootstrapConfig cfg;
  cfg.n_rep = 8;
  CHECK_THROWS_AS(bootstrap_test(ds, cfg), error);
  try {
    bootstrap_test(ds, cfg);
  } catch (const error& e) {
    CHECK(e.code() == errc::missing_raw);
  }
}

TEST_CASE("four-replicate toy run: order statistics and bookkeeping") {
  MetaDataset ds = plain_dataset({0.0, 0.5, 1.0}, {0.2, 0.3, 0.25});
  BootstrapConfig cfg;
  cfg.stat_kind = StatKind::q;
  cfg.n_rep = 4;
  cfg.seed = 99;
  BootstrapOutcome out = bootstrap_test(ds, cfg);
  CHECK(out.result.test_name == "b_q");
  REQUIRE(out.result.df.has_value());
  CHECK(*out.result.df == 2);
  REQUIRE(out.result.n_bootstrap.has_value());
  CHECK(*out.result.n_bootstrap == 4);
  REQUIRE(out.result.seed.has_value());
  CHECK(*out.result.seed == 99);
  CHECK(out.null_statistics.count == 4);
  // ceil(0.95*4) = 4: the critical value is the largest null statistic
  CHECK(out.critical_value_boot == out.null_statistics.max);
  CHECK(out.result.critical_value == out.critical_value_boot);
  CHECK(out.null_statistics.min <= out.null_statistics.q25);
  CHECK(out.null_statistics.q25 <= out.null_statistics.median);
  CHECK(out.null_statistics.median <= out.null_statistics.q75);
  CHECK(out.null_statistics.q75 <= out.null_statistics.max);
  CHECK(out.empirical_p >= 0.0);
  CHECK(out.empirical_p <= 1.0);

  BootstrapOutcome again = bootstrap_test(ds, cfg);
  CHECK(again.empirical_p == out.empirical_p);
  CHECK(again.critical_value_boot == out.critical_value_boot);
  CHECK(again.null_statistics.median == out.null_statistics.median);
}

TEST_CASE("flat data: observed statistic 0 ties with every replicate") {
  MetaDataset ds = plain_dataset({0.4, 0.4, 0.4, 0.4}, {0.5, 0.5, 0.5, 0.5});
  BootstrapConfig cfg;
  cfg.stat_kind = StatKind::reml_lrt;
  cfg.n_rep = 50;
  cfg.seed = 3;
  BootstrapOutcome out = bootstrap_test(ds, cfg);
  CHECK(out.result.statistic == 0.0);
  CHECK(out.empirical_p == 1.0);  // ties count as at-least-as-extreme
  CHECK_FALSE(out.result.reject);
  CHECK(out.clamped_count > 0);  // boundary nulls are common under tau2 = 0
  CHECK(out.tau2_original == 0.0);
}

TEST_CASE("identical results under different worker counts") {
  Rng rng(221);
  MetaDataset ds = testsupport::make_random_dataset(rng, 8, 0);
  for (StatKind kind : {StatKind::q, StatKind::ml_lrt, StatKind::reml_lrt}) {
    BootstrapConfig one;
    one.stat_kind = kind;
    one.n_rep = 60;
    one.seed = 1234;
    one.workers = 1;
    BootstrapConfig three = one;
    three.workers = 3;
    BootstrapOutcome a = bootstrap_test(ds, one);
    BootstrapOutcome b = bootstrap_test(ds, three);
    CHECK(a.empirical_p == b.empirical_p);
    CHECK(a.critical_value_boot == b.critical_value_boot);
    CHECK(a.null_statistics.min == b.null_statistics.min);
    CHECK(a.null_statistics.max == b.null_statistics.max);
    CHECK(a.clamped_count == b.clamped_count);
  }
}

TEST_CASE("magnitude test refuses to reject when the free fit is below the null") {
  MetaDataset ds = plain_dataset({0.4, 0.4, 0.4, 0.4}, {0.5, 0.5, 0.5, 0.5});
  BootstrapConfig cfg;
  cfg.stat_kind = StatKind::reml_lrt;
  cfg.lambda = 0.3;  // well above the free estimate 0
  cfg.n_rep = 40;
  cfg.seed = 8;
  BootstrapOutcome out = bootstrap_test(ds, cfg);
  CHECK(out.tau2_original < cfg.lambda);
  CHECK_FALSE(out.result.reject);
  CHECK(out.result.lambda == 0.3);
}

TEST_CASE("config guards") {
  MetaDataset ds = plain_dataset({0, 1, 2}, {1, 1, 1});
  BootstrapConfig cfg;
  cfg.n_rep = 0;
  CHECK_THROWS_AS(bootstrap_test(ds, cfg), error);
  cfg.n_rep = 10;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(bootstrap_test(ds, cfg), error);
  cfg.alpha = 0.05;
  cfg.lambda = -0.1;
  CHECK_THROWS_AS(bootstrap_test(ds, cfg), error);
}
