#pragma once

#include "tsh/graph.hpp"

namespace tsh {

// Kruskal MST; deterministic (weight, edge id) ordering. Throws on
// disconnected input.
std::vector<EdgeId> minimum_spanning_tree(const Graph& g);

// Unique flow supported on the given spanning tree whose divergence is b,
// computed leaf-upward. Optimal among tree-supported flows by uniqueness.
Flow route_on_tree(const Graph& g, const std::vector<EdgeId>& tree, const DemandVector& b);

// Exact S-SSSP potential of a tree-shaped graph (phi = d_T(S, .), alpha = 1).
// Throws if the input has a cycle or is disconnected.
SsspPotential tree_sssp_potential(const Graph& tree_graph, const std::vector<VertexId>& sources);

// Removes all directed cycles from the support of f without changing its
// divergence; cost never increases. Needed because composed solver flows are
// not cycle-free even when each constituent is.
Flow cancel_flow_cycles(const Graph& g, Flow f);

struct AspectReport {
    double z = 0.0;        // MST routing cost used as the scale pivot
    double shift = 0.0;    // additive weight shift Z / n^(C+5)
    int exponent_c = 0;
    int deleted_edges = 0;
    bool degenerate = false;                // b == 0, graph returned unchanged
    std::vector<EdgeId> kept_edge_ids;      // new edge index -> original edge id
};

// Bounded-aspect-ratio transform: deletes edges heavier than the MST routing
// cost Z of b and shifts remaining weights up by Z/n^(C+5), preserving opt(b)
// within a 1 + 1/n^2 factor.  Requires integral balanced b.
std::pair<Graph, AspectReport> normalize_aspect_ratio(const Graph& g, const DemandVector& b);

} // namespace tsh
