#pragma once

#include "kinchain/config.hpp"

namespace kinchain {

// Executes a scenario: deterministic artifacts (grid dumps, CSV series,
// residual tables) under cfg.out_dir.  Returns the paths written.
std::vector<std::filesystem::path> run(const RunConfig& cfg);

// Builds the initial state a config describes (shared with the CLI tests).
DistributionField build_state(const RunConfig& cfg);

} // namespace kinchain
