#pragma once

#include "tsh/graph.hpp"

#include <cstdint>
#include <functional>

namespace tsh {

// Vertex points in k-dimensional l1 space. Points are stored unscaled
// (contractive: ||x_u - x_v||_1 <= d(u,v)); multiplying by `scale` makes the
// embedding expansive in the definitional d <= ||.|| <= alpha*d sense.
struct Embedding {
    std::vector<std::vector<double>> points; // vertex-indexed, size k each
    int dimension = 0;
    double scale = 1.0;
    double measured_contraction = 0.0; // min ||x_u-x_v||_1 / d(u,v)
    double measured_expansion = 0.0;   // max ||x_u-x_v||_1 / d(u,v)

    double l1_distance(VertexId u, VertexId v) const;
};

// Contract: returns a (1 + 1/log n)-approximate S-SSSP potential of g.
using PotentialOracle = std::function<SsspPotential(const Graph&, const std::vector<VertexId>&)>;

// Exact oracle backed by multi-source Dijkstra (alpha = 1).
SsspPotential exact_potential_oracle(const Graph& g, const std::vector<VertexId>& S);

struct BourgainParams {
    int num_rounds = 0;      // N; 0 means ceil(c_n * log2 n)
    int num_levels = 0;      // T; 0 means ceil(log2 n)
    double c_n = 8.0;
};

// Bourgain-style l1 embedding driven by an approximate SSSP-potential oracle:
// for each round i and level t, samples S with per-vertex probability 2^-t
// and emits the normalized potential divided by N*T as one coordinate. An
// empty sample contributes an all-zero coordinate.
Embedding bourgain_embed(const Graph& g, const PotentialOracle& oracle, BourgainParams params,
                         std::uint64_t seed);

// Random sign-matrix projection scaled by 1/sqrt(target_dim); distortion is
// re-measured, never assumed. identity_mode bypasses the projection (tests).
Embedding jl_reduce(const Embedding& e, const Graph& g, int target_dim, std::uint64_t seed,
                    bool identity_mode = false);

// Min and max of ||x_u-x_v||_1 / d(u,v). Exact over all pairs when n <= 512,
// otherwise over pair_budget sampled pairs.
std::pair<double, double> measure_distortion(const Embedding& e, const Graph& g,
                                             int pair_budget = 100000,
                                             std::uint64_t seed = 0x5eedULL);

} // namespace tsh
