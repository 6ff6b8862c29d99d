#pragma once

#include "tsh/embed.hpp"
#include "tsh/routing.hpp"
#include "tsh/solver.hpp"
#include "tsh/sparsify.hpp"
#include "tsh/sssp.hpp"

#include <cstdint>

namespace tsh {

struct PipelineConfig {
    int base_threshold = 512;      // edge count below which exact Dijkstra wins
    double spanner_k = 0.0;        // 0 => 4 * ceil(log2 n)
    double spanner_cluster_c = 12.0;
    double bourgain_c_n = 8.0;
    int jl_dim = 0;                // 0 => max(6, ceil(log2 n))
    RoutingParams routing;
    SolverConfig solver;
    int max_depth = 10;
    std::uint64_t seed = 1;
};

struct RoutingBundle {
    Embedding embedding;     // after dimension reduction
    PointSet points;         // normalized for the grid routing
    double point_scale = 1.0;
    RoutingMatrix matrix;    // calibrated
    double kappa = 1.0;
    std::uint64_t routing_seed = 0;
};

// Embedding + routing-matrix construction shared by the transshipment command
// and the recursive SSSP driver. The potential oracle feeding the embedding is
// the spanner/core recursion when the graph is large, exact Dijkstra once the
// instance is small enough that approximation machinery costs more.
RoutingBundle build_routing_bundle(const Graph& g, const PipelineConfig& cfg, int depth = 0);

// Full (1+eps)-approximate transshipment on one connected graph.
SolveReport pipeline_transshipment(const Graph& g, const DemandVector& b, double eps,
                                   const PipelineConfig& cfg);

// Fig.-1 style recursive SSSP driver: below the base threshold exact Dijkstra;
// otherwise ultra-spanner -> core recursion -> embedding -> routing matrix ->
// boosted transshipment -> TS-to-SSSP outer loop at the caller's eps.
SsspResult recursive_sssp(const Graph& g, VertexId s, double eps, const PipelineConfig& cfg,
                          int depth = 0);

// Transshipment solver contract handed to the expected-SSSP recursion levels:
// exact below the base threshold, embedding + boosting above it.
RecTsSolver make_recursive_ts_solver(const PipelineConfig& cfg);

} // namespace tsh
