#pragma once

#include "tsh/graph.hpp"

#include <cstdint>
#include <string>

namespace tsh {

// Deterministic instance generators used by the CLI `gen` subcommand and the
// test suites, so acceptance runs need no external data.
Graph gen_path(int n, double weight = 1.0);
Graph gen_cycle(int n, double weight = 1.0);
Graph gen_grid(int rows, int cols, double weight = 1.0);
Graph gen_complete(int n, double weight = 1.0);

// Random spanning tree plus extra random edges, weights uniform in
// [1, weight_spread]; always connected and simple.
Graph gen_random_connected(int n, int m, double weight_spread, std::uint64_t seed);

// Balanced integral demands with |b_v| <= max_abs, at least one nonzero.
DemandVector gen_random_demands(int n, int max_abs, std::uint64_t seed);

Graph gen_by_name(const std::string& name, int n, int m, double weight_spread,
                  std::uint64_t seed);

} // namespace tsh
