#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "metaboot/kernels.hpp"
#include "metaboot/report.hpp"

namespace {

void add_data_options(CLI::App* sub, metaboot::AnalysisRequest& req,
                      std::string& effect) {
  sub->add_option("--input,-i", req.input_path, "input CSV with header row")
      ->required();
  sub->add_option("--effect,-e", effect,
                  "effect family: smd (standardized mean difference), "
                  "fcor (Fisher-transformed correlation), lnor (log odds ratio)")
      ->required();
  sub->add_option("--model,-m", req.model, "random (default) or mixed")
      ->check(CLI::IsMember({"random", "mixed"}));
  sub->add_option("--mods", req.moderator_columns,
                  "moderator column names (mixed model)")
      ->delimiter(',');
  sub->add_flag("--adjust", req.adjust,
                "apply the small-sample bias correction to pre-computed "
                "standardized mean differences");
  sub->add_option("--export", req.export_path,
                  "write the ingested dataset back out as CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parametric-bootstrap heterogeneity tests for meta-analysis"};
  app.require_subcommand(1);

  metaboot::AnalysisRequest req;
  std::string effect = "smd";
  std::string output = "text";
  std::string backend = "auto";
  app.add_option("--output,-o", output, "report form: text, json, or both")
      ->check(CLI::IsMember({"text", "json", "both"}));
  app.add_option("--backend", backend,
                 "numeric kernel set: auto (default), scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  CLI::App* fit_cmd = app.add_subcommand("fit", "estimate the model");
  fit_cmd->fallthrough();
  add_data_options(fit_cmd, req, effect);

  CLI::App* test_cmd = app.add_subcommand("test", "run heterogeneity tests");
  test_cmd->fallthrough();
  add_data_options(test_cmd, req, effect);
  test_cmd
      ->add_option("--stat,-s", req.stats,
                   "tests to run: q, ml_lrt, reml_lrt, b_q, b_ml_lrt, "
                   "b_reml_lrt (comma separated)")
      ->delimiter(',')
      ->required();
  test_cmd->add_option("--lambda", req.lambda,
                       "null dispersion level for the bootstrap tests");
  test_cmd->add_option("--alpha", req.alpha, "test level (default 0.05)");
  test_cmd->add_option("--nrep,-B", req.n_rep,
                       "bootstrap replicates (default 10000)");
  test_cmd->add_option("--seed", req.seed, "RNG seed (default 0)");
  test_cmd->add_option("--workers,-j", req.workers,
                       "worker threads (default METABOOT_WORKERS or all cores)");

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "run a Monte Carlo rejection-rate grid");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--grid,-g", req.input_path, "grid config file")
      ->required();
  sim_cmd->add_option("--seed", req.seed, "root seed for cells without one");
  sim_cmd->add_option("--workers,-j", req.workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  req.subcommand = app.get_subcommands().front()->get_name();
  try {
    if (backend == "scalar") metaboot::set_backend(metaboot::BackendKind::scalar);
    if (backend == "avx2") metaboot::set_backend(metaboot::BackendKind::avx2);
    if (req.subcommand != "simulate")
      req.effect = metaboot::effect_kind_from_name(effect);
    metaboot::Report rep = metaboot::run(req);
    if (output == "text" || output == "both") std::cout << rep.text;
    if (output == "json" || output == "both") std::cout << rep.records;
  } catch (const metaboot::error& e) {
    std::cerr << "metaboot: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "metaboot: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
