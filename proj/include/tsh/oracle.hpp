#pragma once

#include "tsh/graph.hpp"

#include <cstdint>

namespace tsh {

// Exact baselines. Test fixtures and verification only, not production scale.

struct OracleResult {
    double opt_cost = 0.0;
    std::optional<Flow> witness_flow;
    std::optional<Potential> witness_potential;
};

inline constexpr int kOracleSizeCap = 2000;

// Exact uncapacitated min-cost flow by successive shortest paths with vertex
// potentials; reduced costs stay nonnegative so every augmentation is a plain
// Dijkstra. The final potentials are an optimal dual witness.
OracleResult exact_transshipment(const Graph& g, const DemandVector& b,
                                 int size_cap = kOracleSizeCap);

// Exact pairwise distances via repeated Dijkstra.
std::vector<std::vector<double>> exact_apsp(const Graph& g, int size_cap = kOracleSizeCap);

// Exact dyadic rational (num * 2^exp).  The 1-D routing scheme only ever
// halves demands, so this reproduces the reference costs bit-exactly.
struct Dyadic {
    std::int64_t num = 0;
    int exp = 0; // value = num * 2^exp

    static Dyadic from_int(std::int64_t v) { return {v, 0}; }
    bool is_zero() const { return num == 0; }
    Dyadic half() const { return {num, exp - 1}; }
    Dyadic abs() const { return {num < 0 ? -num : num, exp}; }
    Dyadic normalized() const;
    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;
    Dyadic times_pow2(int k) const { return {num, exp + k}; }
    bool operator==(const Dyadic& o) const;
    bool negative() const { return num < 0; }
    double to_double() const;
};

struct LineRoutingResult {
    std::vector<double> iteration_costs;  // iterations t = 1..max_level
    std::vector<double> level_opt_costs;  // 2 * exact transshipment of each b_t
    double final_merge_cost = 0.0;        // residual routed 0 -> 2^max_level
    double total_cost = 0.0;              // iterations plus the final merge
};

// Sherman's deterministic 1-D oblivious routing: on iteration t, every point
// x == 2^(t-1) (mod 2^t) sends half its demand to x - 2^(t-1) and half to
// x + 2^(t-1).  Demands are (coordinate, value) pairs on integers in
// [0, 2^max_level].  level_opt_costs uses the doubled cost(R) convention.
LineRoutingResult line_routing_demo(const std::vector<std::pair<std::int64_t, std::int64_t>>& demands,
                                    int max_level);

} // namespace tsh
