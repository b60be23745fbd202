#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metaboot/types.hpp"

namespace metaboot {

// One CLI invocation's worth of work.  model "random" is intercept-only,
// "mixed" adds the named moderator columns.  `stats` picks any subset of
// {q, ml_lrt, reml_lrt, b_q, b_ml_lrt, b_reml_lrt}; the b_* tests share
// `seed`, so they see the same synthetic replicates.
struct AnalysisRequest {
  std::string subcommand;  // fit | test | simulate
  EffectKind effect = EffectKind::smd;
  std::string input_path;  // data CSV, or the grid file for simulate
  std::string model = "random";
  std::vector<std::string> moderator_columns;
  std::vector<std::string> stats;
  double lambda = 0.0;
  double alpha = 0.05;
  std::size_t n_rep = 10000;
  bool adjust = false;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string export_path;  // when set, the ingested dataset is written back

  void validate() const;
};

struct Report {
  std::string text;     // human-readable summary
  std::string records;  // one JSON object per line; byte-stable under a seed
};

// Executes the request: ingest + fits (+ tests / simulation grid) and renders
// both report forms.  Classical tests always address tau2 = 0; `lambda`
// shifts the null of the bootstrap tests only.  Timing never enters
// `records`, so fixed (input, seed) gives byte-identical structured output.
Report run(const AnalysisRequest& request);

}  // namespace metaboot
