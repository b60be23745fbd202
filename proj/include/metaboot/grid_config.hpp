#pragma once

#include <string>
#include <vector>

#include "metaboot/simulation.hpp"

namespace metaboot {

struct GridCell {
  std::string label;
  SimulationConfig config;
};

// INI-style grid of Monte Carlo cells.  Keys appearing before the first
// [section] are defaults applied to every cell; each [label] section then
// overrides per cell.  '#' and ';' start comments.
//
// Keys: effect (smd|fcor|lnor), k, sizes (pool, space/comma separated), mu,
// tau2, covariates, beta, lambda, tests (q ml_lrt reml_lrt b_q b_ml_lrt
// b_reml_lrt), reps, nrep, alpha, seed.
//
// Cells come back in file order, validated.  Cells whose seed key is absent
// keep seed 0 for the caller to derive.
std::vector<GridCell> parse_grid(const std::string& path);
std::vector<GridCell> parse_grid_text(const std::string& text);

}  // namespace metaboot
