#pragma once

#include "tsh/graph.hpp"
#include "tsh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace testutil {

// Independent single-source oracle: Bellman-Ford.
inline std::vector<double> bellman_ford(const tsh::Graph& g, tsh::VertexId s) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(static_cast<size_t>(g.vertex_count()), inf);
    d[static_cast<size_t>(s)] = 0.0;
    for (int pass = 0; pass < g.vertex_count(); ++pass) {
        bool changed = false;
        for (const tsh::EdgeRec& r : g.edges()) {
            if (d[static_cast<size_t>(r.u)] + r.w < d[static_cast<size_t>(r.v)]) {
                d[static_cast<size_t>(r.v)] = d[static_cast<size_t>(r.u)] + r.w;
                changed = true;
            }
            if (d[static_cast<size_t>(r.v)] + r.w < d[static_cast<size_t>(r.u)]) {
                d[static_cast<size_t>(r.u)] = d[static_cast<size_t>(r.v)] + r.w;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return d;
}

// Independent all-pairs oracle: Floyd-Warshall.
inline std::vector<std::vector<double>> floyd_warshall(const tsh::Graph& g) {
    const double inf = std::numeric_limits<double>::infinity();
    const int n = g.vertex_count();
    std::vector<std::vector<double>> d(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(n), inf));
    for (int v = 0; v < n; ++v) d[static_cast<size_t>(v)][static_cast<size_t>(v)] = 0.0;
    for (const tsh::EdgeRec& r : g.edges()) {
        d[static_cast<size_t>(r.u)][static_cast<size_t>(r.v)] =
            std::min(d[static_cast<size_t>(r.u)][static_cast<size_t>(r.v)], r.w);
        d[static_cast<size_t>(r.v)][static_cast<size_t>(r.u)] =
            std::min(d[static_cast<size_t>(r.v)][static_cast<size_t>(r.u)], r.w);
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    std::min(d[static_cast<size_t>(i)][static_cast<size_t>(j)],
                             d[static_cast<size_t>(i)][static_cast<size_t>(k)] +
                                 d[static_cast<size_t>(k)][static_cast<size_t>(j)]);
    return d;
}

// Exhaustive spanning-tree oracle (n <= 8): minimum total weight over all
// edge subsets of size n-1 that span.
inline double min_spanning_weight_bruteforce(const tsh::Graph& g) {
    const int n = g.vertex_count();
    const int m = g.edge_count();
    double best = std::numeric_limits<double>::infinity();
    for (long mask = 0; mask < (1L << m); ++mask) {
        if (__builtin_popcountl(static_cast<unsigned long>(mask)) != n - 1) continue;
        std::vector<int> parent(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
        auto find = [&](int x) {
            while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
            return x;
        };
        double total = 0.0;
        int joins = 0;
        for (int e = 0; e < m; ++e) {
            if (!(mask & (1L << e))) continue;
            total += g.edge(e).w;
            const int a = find(g.edge(e).u), b = find(g.edge(e).v);
            if (a != b) {
                parent[static_cast<size_t>(a)] = b;
                ++joins;
            }
        }
        if (joins == n - 1) best = std::min(best, total);
    }
    return best;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace testutil
