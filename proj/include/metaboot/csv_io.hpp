#pragma once

#include <string>
#include <vector>

#include "metaboot/types.hpp"

namespace metaboot {

// Reads a headered CSV into a dataset.  Column contracts per effect family:
//   smd:  n1,n2,est  (adjust applies the bias correction to est)
//         or n1,n2,mean1,mean2,sd1,sd2
//   fcor: n,r
//   lnor: n00,n01,n10,n11
// Moderator columns are read by name into the covariate matrix.
MetaDataset ingest_csv(const std::string& path, EffectKind effect,
                       const std::vector<std::string>& moderator_columns = {},
                       bool adjust = false);

// Writes the dataset back out in the same schema (est form for smd); a file
// written here re-ingests to an identical dataset.
void export_csv(const MetaDataset& dataset, const std::string& path,
                const std::vector<std::string>& moderator_columns = {});

}  // namespace metaboot
