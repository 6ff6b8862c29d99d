#pragma once

#include "tsh/graph.hpp"

#include <cstdint>
#include <functional>

namespace tsh {

struct SpannerConfig {
    double cluster_c = 2.0;   // C in beta = C ln(n) / k
    double beta_max = 0.999;  // beta clamp; beta >= 1 degenerates to singleton clusters
    int max_restarts = -1;    // -1 => ceil(log2 n)
};

struct UltraSpanner {
    std::vector<EdgeId> edges; // subset of the input edge ids, original weights
    double k = 0.0;
    int rounds_used = 0;
    double beta = 0.0;
};

// Weight-class spanner: rounds weights down to powers of k, then for each
// class ascending contracts everything already spanned, clusters the class
// graph with exponential shifts, and keeps cluster forests plus all
// inter-cluster class edges. Restarts when a shift exceeds k/6 or the
// inter-cluster total passes 2*beta*m.
UltraSpanner build_ultra_spanner(const Graph& g, double k, std::uint64_t seed,
                                 const SpannerConfig& cfg = {});

struct ContractedPath {
    std::vector<VertexId> vertices; // v_0 .. v_l in original ids, endpoints in the core
    std::vector<double> weights;    // weight of (v_i, v_i+1)
    EdgeId core_edge;               // edge id in the core graph
};

struct ForestComponent {
    VertexId root;                       // the unique vertex shared with the core part
    std::vector<EdgeId> edges;           // original edge ids of this hanging tree
    std::vector<VertexId> vertices;      // excludes the root
};

struct CoreDecomposition {
    Graph core;                              // <= 4t vertices, <= 5t edges
    std::vector<VertexId> core_to_original;  // core vertex -> original id
    std::vector<int> original_to_core;       // -1 when not a core vertex
    std::vector<ContractedPath> contracted_paths;
    std::vector<ForestComponent> forest_components;
    int excess = 0; // t = m - (n-1)
};

// Vertex sparsification: S0 = endpoints of non-tree edges plus s, T0 = the
// Steiner subtree of S0 in the spanning tree, core = T0 with its bare
// degree-2 paths contracted plus the non-tree edges; everything else hangs
// off the core as a forest.
CoreDecomposition decompose_core(const Graph& g, const std::vector<EdgeId>& spanning_tree,
                                 VertexId s);

// Extends an s-SSSP potential on the core to the whole graph: two-sided min
// along contracted paths, exact root-offset tree distances in the forest.
// Preserves the approximation factor of phi1.
SsspPotential extend_potential(const Graph& g, const CoreDecomposition& dec,
                               const SsspPotential& phi1, VertexId s);

// Contract: given a connected graph and a source inside it, produce a
// validated alpha-approximate s-SSSP potential.
using InnerSsspSolver = std::function<SsspPotential(const Graph&, VertexId)>;

// S-SSSP via whole-set contraction: contracts S to one vertex (parallel
// edges keep the minimum weight), decomposes the core, runs `inner` there,
// extends, and un-contracts by giving all of S the source value.
SsspPotential sparsified_sssp_potential(const Graph& g, const std::vector<VertexId>& S,
                                        double alpha, const InnerSsspSolver& inner);

} // namespace tsh
