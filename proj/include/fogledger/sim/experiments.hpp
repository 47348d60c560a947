#pragma once

#include <optional>

#include "fogledger/sim/metrics.hpp"
#include "fogledger/sim/scenario.hpp"

namespace fogledger::sim {

// Sense-process-actuation workload over scenario.duration_ms after bootstrap.
// Fills loop delays, host energy and the transaction tally.
Metrics run_loop(const Scenario& scenario, Placement placement, std::uint64_t seed);

// Stores records of every configured size, then issues sequential data
// requests from random devices. `hit_ratio` overrides the scenario's value.
Metrics run_retrieval(const Scenario& scenario, Placement placement, std::uint64_t seed,
                      std::optional<double> hit_ratio = std::nullopt);

// Periodic readings from `devices` devices under the fog placement; fills
// consensus and commit delays measured after bootstrap.
Metrics run_scaling(const Scenario& scenario, std::uint64_t seed, std::size_t devices);

}  // namespace fogledger::sim
