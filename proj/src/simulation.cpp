#include "metaboot/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "metaboot/effect_sizes.hpp"
#include "metaboot/parallel.hpp"
#include "metaboot/stat_tests.hpp"

namespace metaboot {

const char* test_select_name(TestSelect t) noexcept {
  switch (t) {
    case TestSelect::q: return "q";
    case TestSelect::ml_lrt: return "ml_lrt";
    case TestSelect::reml_lrt: return "reml_lrt";
    case TestSelect::b_q: return "b_q";
    case TestSelect::b_ml_lrt: return "b_ml_lrt";
    case TestSelect::b_reml_lrt: return "b_reml_lrt";
  }
  return "unknown";
}

TestSelect test_select_from_name(const std::string& name) {
  for (TestSelect t : {TestSelect::q, TestSelect::ml_lrt, TestSelect::reml_lrt,
                       TestSelect::b_q, TestSelect::b_ml_lrt,
                       TestSelect::b_reml_lrt})
    if (name == test_select_name(t)) return t;
  fail(errc::bad_config, "unknown test name '" + name + "'");
}

bool test_select_is_bootstrap(TestSelect t) noexcept {
  return t == TestSelect::b_q || t == TestSelect::b_ml_lrt ||
         t == TestSelect::b_reml_lrt;
}

void SimulationConfig::validate() const {
  if (k_studies < 2) fail(errc::bad_config, "k_studies must be >= 2");
  if (size_pool.empty()) fail(errc::bad_config, "size_pool is empty");
  for (double s : size_pool)
    if (!(s >= 4.0))
      fail(errc::bad_config, "size_pool entries must be >= 4");
  if (!(tau2_true >= 0.0)) fail(errc::bad_config, "tau2_true must be >= 0");
  if (!(lambda_null >= 0.0)) fail(errc::bad_config, "lambda_null must be >= 0");
  if (n_replications < 1) fail(errc::bad_config, "n_replications must be >= 1");
  if (stat_kinds.empty()) fail(errc::bad_config, "no tests requested");
  if (n_covariates > 0 && k_studies <= n_covariates + 1)
    fail(errc::bad_config, "need k_studies > n_covariates + 1");
}

namespace {

constexpr int kStudyRetries = 100;

long rounded_size(double s) { return static_cast<long>(std::lround(s)); }

// One study's raw-data simulation.  Draw order is fixed and documented by the
// code path itself: size index, covariates, true-effect noise, then the
// family-specific draws; degenerate outcomes redraw the family-specific part.
StudyEffect simulate_study(const SimulationConfig& cfg, Rng& rng,
                           std::vector<double>* z_row) {
  double size =
      cfg.size_pool.size() == 1
          ? cfg.size_pool[0]
          : cfg.size_pool[rng.uniform_below(cfg.size_pool.size())];
  double mean = cfg.mu_delta;
  z_row->clear();
  for (std::size_t c = 0; c < cfg.n_covariates; ++c) {
    double z = rng.normal();
    z_row->push_back(z);
    mean += cfg.beta_value * z;
  }
  double delta = mean + std::sqrt(cfg.tau2_true) * rng.normal();

  for (int attempt = 0; attempt < kStudyRetries; ++attempt) {
    switch (cfg.kind) {
      case EffectKind::smd: {
        long n = rounded_size(size);
        // control group ~ N(0,1), treatment ~ N(delta,1)
        double s1 = 0, ss1 = 0, s2 = 0, ss2 = 0;
        for (long i = 0; i < n; ++i) {
          double y = rng.normal();
          s1 += y;
          ss1 += y * y;
        }
        for (long i = 0; i < n; ++i) {
          double y = delta + rng.normal();
          s2 += y;
          ss2 += y * y;
        }
        double dn = static_cast<double>(n);
        double m1 = s1 / dn, m2 = s2 / dn;
        double var1 = (ss1 - dn * m1 * m1) / (dn - 1.0);
        double var2 = (ss2 - dn * m2 * m2) / (dn - 1.0);
        if (!(var1 + var2 > 0.0)) continue;  // flat sample: redraw
        return smd_from_summary(n, n, m2, m1, std::sqrt(var2), std::sqrt(var1));
      }
      case EffectKind::fisher_z: {
        long n = rounded_size(size);
        double rho = std::tanh(delta);
        double c = std::sqrt(1.0 - rho * rho);
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (long i = 0; i < n; ++i) {
          double u = rng.normal();
          double v = rho * u + c * rng.normal();
          sa += u;
          sb += v;
          saa += u * u;
          sbb += v * v;
          sab += u * v;
        }
        double dn = static_cast<double>(n);
        double cov = sab - sa * sb / dn;
        double va = saa - sa * sa / dn;
        double vb = sbb - sb * sb / dn;
        if (!(va > 0.0) || !(vb > 0.0)) continue;
        double r = cov / std::sqrt(va * vb);
        if (!(std::fabs(r) < 1.0)) continue;
        return fisher_z(r, static_cast<double>(n));
      }
      case EffectKind::log_or: {
        long s = rounded_size(size);
        double ds = static_cast<double>(s);
        // true table: control non-events uniform over the middle of the row,
        // treatment row solved so the table's log odds ratio equals delta
        double t00 = ds * (0.2 + 0.6 * rng.uniform01());
        double t01 = ds - t00;
        double odds = std::exp(delta) * t01 / t00;
        double t10 = ds / (1.0 + odds);
        double t11 = ds - t10;
        if (t00 < 1.0 || t01 < 1.0 || t10 < 1.0 || t11 < 1.0) continue;
        // observed table: one binomial per row, totals preserved exactly
        long n00 = rng.binomial(s, t00 / ds);
        long n10 = rng.binomial(s, t10 / ds);
        return log_odds_ratio(static_cast<double>(n00),
                              static_cast<double>(s - n00),
                              static_cast<double>(n10),
                              static_cast<double>(s - n10));
      }
    }
  }
  fail(errc::degenerate_sample,
       "study simulation kept producing degenerate samples");
}

std::string fmt_trimmed(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string fmt_cell(const RateEntry& e) {
  std::string rate = e.rejection_rate == 0.0 ? "0" : fmt_trimmed(e.rejection_rate);
  std::string se =
      e.mc_se < 0.0005 ? "<0.001" : fmt_trimmed(e.mc_se);
  return rate + " (" + se + ")";
}

}  // namespace

MetaDataset generate_dataset(const SimulationConfig& cfg, Rng& rng) {
  MetaDataset out;
  out.n_covariates = cfg.n_covariates;
  out.studies.reserve(cfg.k_studies);
  std::vector<double> z_row;
  for (std::size_t j = 0; j < cfg.k_studies; ++j) {
    out.studies.push_back(simulate_study(cfg, rng, &z_row));
    out.covariates.insert(out.covariates.end(), z_row.begin(), z_row.end());
  }
  return out;
}

SimulationResult run_rejection_study(const SimulationConfig& cfg) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  const std::size_t n_tests = cfg.stat_kinds.size();
  const std::size_t R = cfg.n_replications;

  // reject[r*n_tests + t]; 0/1, or all slots ignored when the rep failed
  std::vector<std::uint8_t> reject(R * n_tests, 0);
  std::vector<std::uint8_t> failed(R, 0);

  parallel_for(R, cfg.workers, [&](std::size_t r) {
    try {
      Rng rng(derive_seed(cfg.seed, r, 0));
      MetaDataset ds = generate_dataset(cfg, rng);
      for (std::size_t t = 0; t < n_tests; ++t) {
        TestSelect sel = cfg.stat_kinds[t];
        bool rej = false;
        switch (sel) {
          case TestSelect::q:
            rej = q_test(ds, cfg.bootstrap.alpha).reject;
            break;
          case TestSelect::ml_lrt:
            rej = lr_test(ds, FitMethod::ml, cfg.bootstrap.alpha).reject;
            break;
          case TestSelect::reml_lrt:
            rej = lr_test(ds, FitMethod::reml, cfg.bootstrap.alpha).reject;
            break;
          default: {
            BootstrapConfig bc = cfg.bootstrap;
            bc.stat_kind = sel == TestSelect::b_q ? StatKind::q
                           : sel == TestSelect::b_ml_lrt ? StatKind::ml_lrt
                                                         : StatKind::reml_lrt;
            bc.lambda = cfg.lambda_null;
            bc.seed = derive_seed(cfg.seed, r, 1 + t);
            bc.workers = 1;  // replication level owns the parallelism
            rej = bootstrap_test(ds, bc).result.reject;
          }
        }
        reject[r * n_tests + t] = rej ? 1 : 0;
      }
    } catch (const error&) {
      failed[r] = 1;
    }
  });

  SimulationResult out;
  out.n_replications = R;
  std::size_t n_failed = 0;
  for (std::uint8_t f : failed) n_failed += f;
  out.nonconvergence_rate = static_cast<double>(n_failed) / static_cast<double>(R);
  std::size_t valid = R - n_failed;
  for (std::size_t t = 0; t < n_tests; ++t) {
    RateEntry e;
    e.test = cfg.stat_kinds[t];
    e.valid = valid;
    for (std::size_t r = 0; r < R; ++r)
      if (!failed[r]) e.rejections += reject[r * n_tests + t];
    if (valid > 0) {
      e.rejection_rate =
          static_cast<double>(e.rejections) / static_cast<double>(valid);
      e.mc_se = std::sqrt(e.rejection_rate * (1.0 - e.rejection_rate) /
                          static_cast<double>(valid));
    }
    out.rates.push_back(e);
  }
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

std::string render_results_table(const std::vector<SimulationResult>& results,
                                 const TableLayout& layout) {
  if (results.empty()) return "";
  std::vector<std::string> headers{"cell"};
  for (TestSelect t : layout.columns) headers.push_back(test_select_name(t));

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SimulationResult& res = results[i];
    std::vector<std::string> row;
    row.push_back(res.label.empty() ? "#" + std::to_string(i + 1) : res.label);
    for (TestSelect col : layout.columns) {
      std::string cell = "-";
      for (const RateEntry& e : res.rates)
        if (e.test == col) cell = fmt_cell(e);
      row.push_back(cell);
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::string text;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      text += row[c];
      if (c + 1 < row.size())
        text += std::string(width[c] - row[c].size() + 2, ' ');
    }
    text += '\n';
  };
  emit_row(headers);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + 2;
  text += std::string(total > 2 ? total - 2 : total, '-');
  text += '\n';
  for (const auto& row : rows) emit_row(row);
  return text;
}

}  // namespace metaboot
