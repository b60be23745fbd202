#include "metaboot/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "metaboot/bootstrap.hpp"
#include "metaboot/csv_io.hpp"
#include "metaboot/grid_config.hpp"
#include "metaboot/model.hpp"
#include "metaboot/rng.hpp"
#include "metaboot/simulation.hpp"
#include "metaboot/special_functions.hpp"
#include "metaboot/stat_tests.hpp"

namespace metaboot {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v, int decimals = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

StatKind boot_kind(TestSelect t) {
  switch (t) {
    case TestSelect::b_q: return StatKind::q;
    case TestSelect::b_ml_lrt: return StatKind::ml_lrt;
    default: return StatKind::reml_lrt;
  }
}

ordered_json fit_record(const ModelFit& f) {
  ordered_json j;
  j["record"] = "fit";
  j["method"] = fit_method_name(f.method);
  j["mu"] = f.mu_delta;
  j["beta"] = f.beta;
  j["tau2"] = f.tau2;
  j["loglik_ml"] = f.loglik_ml;
  j["loglik_reml"] = f.loglik_reml;
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  return j;
}

ordered_json test_record(const TestResult& r) {
  ordered_json j;
  j["record"] = "test";
  j["name"] = r.test_name;
  j["statistic"] = r.statistic;
  j["p"] = r.p_value;
  j["alpha"] = r.alpha;
  j["critical"] = r.critical_value;
  j["reject"] = r.reject;
  if (r.df) j["df"] = *r.df;
  j["lambda"] = r.lambda;
  if (r.n_bootstrap) j["nrep"] = *r.n_bootstrap;
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

void append_boot_details(ordered_json& j, const BootstrapOutcome& out) {
  j["clamped"] = out.clamped_count;
  j["dropped"] = out.dropped_count;
  j["tau2_free"] = out.tau2_original;
  ordered_json null_summary;
  null_summary["count"] = out.null_statistics.count;
  null_summary["min"] = out.null_statistics.min;
  null_summary["q25"] = out.null_statistics.q25;
  null_summary["median"] = out.null_statistics.median;
  null_summary["q75"] = out.null_statistics.q75;
  null_summary["max"] = out.null_statistics.max;
  j["null"] = null_summary;
}

std::string test_line(const TestResult& r, const BootstrapOutcome* boot) {
  std::ostringstream os;
  os << "  " << r.test_name;
  for (std::size_t i = r.test_name.size(); i < 11; ++i) os << ' ';
  os << " stat = " << fmt(r.statistic) << "   p = " << fmt(r.p_value)
     << "   crit = " << fmt(r.critical_value) << "   "
     << (r.reject ? "reject" : "retain");
  if (r.df) os << "   df = " << *r.df;
  if (boot) {
    os << "   [B = " << *r.n_bootstrap << ", seed = " << *r.seed;
    if (boot->dropped_count) os << ", dropped = " << boot->dropped_count;
    os << "]";
  }
  os << '\n';
  return os.str();
}

Report run_analysis(const AnalysisRequest& req) {
  MetaDataset ds =
      ingest_csv(req.input_path, req.effect, req.moderator_columns, req.adjust);
  if (!req.export_path.empty())
    export_csv(ds, req.export_path, req.moderator_columns);

  ModelFit reml = fit(ds, FitMethod::reml, 0.0);
  ModelFit ml = fit(ds, FitMethod::ml, 0.0);
  QResult qr = q_statistic(ds);
  double q_p = chi_square_sf(qr.q, qr.df);

  std::vector<ordered_json> recs;
  ordered_json head;
  head["record"] = "dataset";
  head["path"] = req.input_path;
  head["effect"] = effect_kind_name(req.effect);
  head["k"] = ds.k();
  head["moderators"] = ds.p();
  recs.push_back(head);
  recs.push_back(fit_record(reml));
  recs.push_back(fit_record(ml));

  ordered_json het;
  het["record"] = "heterogeneity";
  het["q"] = qr.q;
  het["df"] = qr.df;
  het["p"] = q_p;
  HeterogeneityIndexes idx{};
  if (ds.p() == 0) {
    idx = heterogeneity_indexes(ds);
    het["i2"] = idx.i2;
    het["h"] = idx.h;
  }
  recs.push_back(het);

  std::ostringstream text;
  text << "metaboot " << req.subcommand << " - " << effect_kind_name(req.effect)
       << ", " << ds.k() << " studies";
  if (ds.p()) text << ", " << ds.p() << " moderators";
  text << " (" << req.input_path << ")\n\n";
  auto fit_line = [&](const char* tag, const ModelFit& f) {
    text << "  " << tag << "  mu = " << fmt(f.mu_delta);
    for (std::size_t i = 0; i < f.beta.size(); ++i)
      text << "   b" << i + 1 << " = " << fmt(f.beta[i]);
    text << "   tau2 = " << fmt(f.tau2, 6) << "   loglik = "
         << fmt(f.method == FitMethod::ml ? f.loglik_ml : f.loglik_reml);
    if (!f.converged) text << "   NOT CONVERGED";
    text << '\n';
  };
  fit_line("REML", reml);
  fit_line("ML  ", ml);
  text << "  Q(" << qr.df << ") = " << fmt(qr.q) << "   p = " << fmt(q_p);
  if (ds.p() == 0)
    text << "   I2 = " << fmt(idx.i2, 3) << "   H = " << fmt(idx.h, 3);
  text << '\n';

  if (req.subcommand == "test") {
    text << "\ntests (alpha = " << fmt(req.alpha, 3) << ", lambda = "
         << fmt(req.lambda, 4) << ")\n";
    for (const std::string& name : req.stats) {
      TestSelect sel = test_select_from_name(name);
      if (!test_select_is_bootstrap(sel)) {
        TestResult r =
            sel == TestSelect::q
                ? q_test(ds, req.alpha)
                : lr_test(ds,
                          sel == TestSelect::ml_lrt ? FitMethod::ml
                                                    : FitMethod::reml,
                          req.alpha);
        recs.push_back(test_record(r));
        text << test_line(r, nullptr);
      } else {
        BootstrapConfig bc;
        bc.stat_kind = boot_kind(sel);
        bc.lambda = req.lambda;
        bc.n_rep = req.n_rep;
        bc.alpha = req.alpha;
        bc.seed = req.seed;
        bc.workers = req.workers;
        BootstrapOutcome out = bootstrap_test(ds, bc);
        ordered_json j = test_record(out.result);
        append_boot_details(j, out);
        recs.push_back(j);
        text << test_line(out.result, &out);
      }
    }
  }
  if (!req.export_path.empty())
    text << "\ndataset written to " << req.export_path << '\n';

  Report rep;
  rep.text = text.str();
  std::ostringstream lines;
  for (const ordered_json& j : recs) lines << j.dump() << '\n';
  rep.records = lines.str();
  return rep;
}

Report run_simulation(const AnalysisRequest& req) {
  std::vector<GridCell> cells = parse_grid(req.input_path);
  std::vector<SimulationResult> results;
  std::vector<ordered_json> recs;
  TableLayout layout;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    SimulationConfig cfg = cells[i].config;
    if (cfg.seed == 0) cfg.seed = derive_seed(req.seed, i, 0);
    cfg.workers = req.workers;
    SimulationResult res = run_rejection_study(cfg);
    res.label = cells[i].label;
    for (TestSelect t : cfg.stat_kinds) {
      bool seen = false;
      for (TestSelect u : layout.columns) seen |= (u == t);
      if (!seen) layout.columns.push_back(t);
    }

    ordered_json j;
    j["record"] = "simulation";
    j["cell"] = res.label;
    j["replications"] = res.n_replications;
    j["seed"] = cfg.seed;
    ordered_json rates = ordered_json::array();
    for (const RateEntry& e : res.rates) {
      ordered_json r;
      r["test"] = test_select_name(e.test);
      r["rate"] = e.rejection_rate;
      r["se"] = e.mc_se;
      r["rejections"] = e.rejections;
      r["valid"] = e.valid;
      rates.push_back(r);
    }
    j["rates"] = rates;
    j["nonconvergence"] = res.nonconvergence_rate;
    recs.push_back(j);
    results.push_back(std::move(res));
  }

  std::ostringstream text;
  text << "metaboot simulate - " << cells.size() << " cell"
       << (cells.size() == 1 ? "" : "s") << " (" << req.input_path << ")\n\n";
  text << render_results_table(results, layout);
  double total = 0.0;
  for (const SimulationResult& r : results) total += r.elapsed_seconds;
  text << "\nelapsed " << fmt(total, 1) << " s\n";

  Report rep;
  rep.text = text.str();
  std::ostringstream lines;
  for (const ordered_json& j : recs) lines << j.dump() << '\n';
  rep.records = lines.str();
  return rep;
}

}  // namespace

void AnalysisRequest::validate() const {
  if (subcommand != "fit" && subcommand != "test" && subcommand != "simulate")
    fail(errc::bad_config, "unknown subcommand '" + subcommand + "'");
  if (input_path.empty()) fail(errc::bad_config, "no input file given");
  if (model != "random" && model != "mixed")
    fail(errc::bad_config, "model must be 'random' or 'mixed'");
  if (model == "mixed" && moderator_columns.empty())
    fail(errc::bad_config, "mixed model needs moderator columns");
  if (model == "random" && !moderator_columns.empty())
    fail(errc::bad_config, "moderator columns given but model is 'random'");
  if (adjust && effect != EffectKind::smd)
    fail(errc::bad_config, "adjust applies to standardized mean differences");
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(errc::bad_config, "alpha outside (0,1)");
  if (!(lambda >= 0.0)) fail(errc::bad_config, "lambda must be >= 0");
  if (n_rep < 1) fail(errc::bad_config, "nrep must be at least 1");
  if (subcommand == "test") {
    if (stats.empty()) fail(errc::bad_config, "test wants at least one stat");
    for (const std::string& s : stats) test_select_from_name(s);
  }
}

Report run(const AnalysisRequest& request) {
  request.validate();
  if (request.subcommand == "simulate") return run_simulation(request);
  return run_analysis(request);
}

}  // namespace metaboot
