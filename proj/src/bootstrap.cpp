#include "metaboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "metaboot/effect_sizes.hpp"
#include "metaboot/parallel.hpp"

namespace metaboot {

const char* stat_kind_name(StatKind k) noexcept {
  switch (k) {
    case StatKind::ml_lrt: return "b_ml_lrt";
    case StatKind::reml_lrt: return "b_reml_lrt";
    case StatKind::q: return "b_q";
  }
  return "unknown";
}

double empirical_quantile(const std::vector<double>& values, double q) {
  if (values.empty()) fail(errc::empty_input, "quantile of an empty list");
  if (!(q > 0.0 && q < 1.0)) fail(errc::bad_config, "quantile level outside (0,1)");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  // ceil(q*n) as an order statistic; the 1e-9 backoff absorbs products like
  // 0.95*2000 landing a hair above the exact integer.
  double raw = q * static_cast<double>(sorted.size());
  std::size_t idx = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  if (idx < 1) idx = 1;
  if (idx > sorted.size()) idx = sorted.size();
  return sorted[idx - 1];
}

MetaDataset simulate_null_effects(const ModelFit& fit, const MetaDataset& ds,
                                  double lambda, Rng& rng) {
  MetaDataset out;
  out.covariates = ds.covariates;
  out.n_covariates = ds.n_covariates;
  out.studies.reserve(ds.k());
  for (std::size_t j = 0; j < ds.k(); ++j) {
    const StudyEffect& s = ds.studies[j];
    double mean = fit.mu_delta;
    for (std::size_t c = 0; c < fit.beta.size(); ++c)
      mean += fit.beta[c] * ds.z(j, c);
    double draw = rng.normal(mean, std::sqrt(lambda + s.variance));
    if (s.kind == EffectKind::log_or) {
      const OrRaw* cells = std::get_if<OrRaw>(&s.raw);
      if (!cells)
        fail(errc::missing_raw,
             "log odds ratio study " + std::to_string(j + 1) +
                 " carries no 2x2 cells");
      double ex = std::exp(draw);
      OrRaw u = *cells;
      switch (rng.uniform_below(4)) {
        case 0: u.n00 = ex * cells->n01 * cells->n10 / cells->n11; break;
        case 1: u.n01 = cells->n00 * cells->n11 / (cells->n10 * ex); break;
        case 2: u.n10 = cells->n00 * cells->n11 / (cells->n01 * ex); break;
        default: u.n11 = ex * cells->n01 * cells->n10 / cells->n00; break;
      }
      double var = log_or_variance(u.n00, u.n01, u.n10, u.n11);
      out.studies.push_back({s.kind, draw, var, u});
    } else {
      // synthetic study keeps the original sampling variance
      out.studies.push_back({s.kind, draw, s.variance, s.raw});
    }
  }
  return out;
}

namespace {

struct ReplicateRecord {
  double statistic = 0.0;
  bool clamped = false;
  bool dropped = false;
};

double observed_statistic(const MetaDataset& ds, const BootstrapConfig& cfg,
                          const ModelFit& gen_fit, double* tau2_gate) {
  if (cfg.stat_kind == StatKind::q) {
    *tau2_gate = gen_fit.tau2;  // magnitude gate uses the REML estimate
    return q_statistic(ds).q;
  }
  FitMethod m =
      cfg.stat_kind == StatKind::ml_lrt ? FitMethod::ml : FitMethod::reml;
  detail::LrStat s = detail::lr_statistic(ds, m, cfg.lambda);
  *tau2_gate = s.tau2_hat;
  return s.statistic;
}

}  // namespace

BootstrapOutcome bootstrap_test(const MetaDataset& ds,
                                const BootstrapConfig& cfg) {
  ds.validate();
  if (cfg.n_rep < 1) fail(errc::bad_config, "n_rep must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    fail(errc::bad_config, "alpha outside (0,1)");
  if (!(cfg.lambda >= 0.0)) fail(errc::bad_config, "lambda must be >= 0");
  if (ds.studies[0].kind == EffectKind::log_or)
    for (std::size_t j = 0; j < ds.k(); ++j)
      if (!std::holds_alternative<OrRaw>(ds.studies[j].raw))
        fail(errc::missing_raw, "log odds ratio study " + std::to_string(j + 1) +
                                    " carries no 2x2 cells");

  // generating parameters: location from the free REML fit, dispersion lambda
  ModelFit gen_fit = fit(ds, FitMethod::reml, 0.0);
  double tau2_gate = gen_fit.tau2;
  double observed = observed_statistic(ds, cfg, gen_fit, &tau2_gate);

  FitMethod lrt_method =
      cfg.stat_kind == StatKind::ml_lrt ? FitMethod::ml : FitMethod::reml;
  std::vector<ReplicateRecord> records(cfg.n_rep);
  parallel_for(cfg.n_rep, cfg.workers, [&](std::size_t i) {
    ReplicateRecord& rec = records[i];
    for (int attempt = 0;; ++attempt) {
      try {
        Rng rng(derive_seed(cfg.seed, i, static_cast<std::uint64_t>(attempt)));
        MetaDataset synth = simulate_null_effects(gen_fit, ds, cfg.lambda, rng);
        if (cfg.stat_kind == StatKind::q) {
          rec.statistic = q_statistic(synth).q;
        } else {
          detail::LrStat s =
              detail::lr_statistic(synth, lrt_method, cfg.lambda);
          rec.statistic = s.statistic;
          rec.clamped = s.tau2_hat <= cfg.lambda;
        }
        return;
      } catch (const error& e) {
        if (e.code() != errc::non_convergence) throw;
        if (attempt >= 3) {  // initial draw plus three redraws
          rec.dropped = true;
          return;
        }
      }
    }
  });

  std::vector<double> stats;
  stats.reserve(cfg.n_rep);
  BootstrapOutcome out;
  for (const ReplicateRecord& rec : records) {
    if (rec.dropped) {
      ++out.dropped_count;
      continue;
    }
    stats.push_back(rec.statistic);
    if (rec.clamped) ++out.clamped_count;
  }
  if (stats.empty())
    fail(errc::non_convergence, "every bootstrap replicate failed to converge");

  std::size_t n_ge = 0;
  for (double s : stats)
    if (s >= observed) ++n_ge;
  out.empirical_p = static_cast<double>(n_ge) / static_cast<double>(stats.size());
  out.critical_value_boot = empirical_quantile(stats, 1.0 - cfg.alpha);
  out.tau2_original = tau2_gate;

  auto [mn, mx] = std::minmax_element(stats.begin(), stats.end());
  out.null_statistics = {stats.size(), *mn, empirical_quantile(stats, 0.25),
                         empirical_quantile(stats, 0.5),
                         empirical_quantile(stats, 0.75), *mx};

  TestResult& r = out.result;
  r.test_name = stat_kind_name(cfg.stat_kind);
  r.statistic = observed;
  r.p_value = out.empirical_p;
  r.alpha = cfg.alpha;
  r.critical_value = out.critical_value_boot;
  r.reject = observed > out.critical_value_boot &&
             (cfg.lambda > 0.0 ? tau2_gate > cfg.lambda : true);
  if (cfg.stat_kind == StatKind::q) r.df = ds.k() - ds.p() - 1;
  r.lambda = cfg.lambda;
  r.n_bootstrap = cfg.n_rep;
  r.seed = cfg.seed;
  return out;
}

}  // namespace metaboot
