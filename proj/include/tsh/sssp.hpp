#pragma once

#include "tsh/graph.hpp"
#include "tsh/solver.hpp"

#include <cstdint>
#include <functional>

namespace tsh {

// Transshipment solver contract for the expected-SSSP recursion: returns a
// (1+eps)-approximate flow with acyclic support and divergence exactly b.
using RecTsSolver = std::function<Flow(const Graph&, const DemandVector&, double)>;

// Flow-potential solver on the ambient graph (demands vary, graph fixed).
using PairSolver = std::function<SolveReport(const DemandVector&, double)>;

struct EsssTree {
    VertexId root = 0;
    std::vector<EdgeId> edges; // subset of the graph's edges, possibly non-spanning
};

// Distances from the root inside the tree; +inf off the tree.
std::vector<double> tree_distances(const Graph& g, const EsssTree& tree,
                                   std::vector<VertexId>* parent = nullptr,
                                   std::vector<EdgeId>* parent_edge = nullptr);

// Rounds a transshipment flow into a random tree whose demand-weighted
// distances from s are near-optimal in expectation: samples one incoming
// flow arc per vertex, contracts the resulting per-component cycles, recurses
// on the component graph, and reassembles. Demands use the library sign
// convention: b_v >= 0 for v != s (receivers), b_s <= 0.
// The per-level solver accuracy is eps/(3*ceil(log2 n)) so the compounded
// approximation stays within (1 + 2*eps) for eps <= 1/2.
EsssTree expected_sssp(const Graph& g, VertexId s, const DemandVector& b, double eps,
                       const RecTsSolver& solver, std::uint64_t seed,
                       const Flow* top_flow = nullptr);

struct SsspResult {
    VertexId source = 0;
    std::vector<VertexId> parent;    // -1 at the source
    std::vector<EdgeId> parent_edge; // -1 at the source
    std::vector<double> dist;        // d*: per-vertex certified upper bounds
    SsspPotential potential;         // alpha = 1 + eps
    int loops = 0;
    long solver_iterations = 0;
};

// Outer loop converting expected guarantees into per-vertex ones: keeps an
// active set V', obtains a flow-potential pair and an expected tree for its
// demands, relaxes d*/p* along the tree, folds the potential into phi* by
// coordinatewise max, and removes vertices certified by d_T <= (1+eps) phi*.
SsspResult sssp_from_transshipment(const Graph& g, VertexId s, double eps,
                                   const PairSolver& pair_solver, const RecTsSolver& rec_solver,
                                   std::uint64_t seed, double loop_cap_c = 6.0);

} // namespace tsh
