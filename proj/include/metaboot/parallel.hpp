#pragma once

#include <cstddef>
#include <functional>

namespace metaboot {

// Worker count resolution: explicit request > METABOOT_WORKERS > hardware.
int default_workers();
int resolve_workers(int requested);

// Runs body(i) for i in [0, n) across `workers` threads (block partition).
// Results must be written to per-index slots; the partition is not part of
// the output contract, per-index seeding is what makes runs reproducible.
// The first exception thrown by any worker is rethrown after the join.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace metaboot
