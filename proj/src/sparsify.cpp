#include "tsh/sparsify.hpp"

#include "tsh/rng.hpp"
#include "tsh/tree_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace tsh {

namespace {

// Multi-source BFS with integral head starts -delta_u; every vertex joins the
// cluster of the center minimizing d(u, v) - delta_u, ties by center id.
struct ClusterResult {
    std::vector<int> cluster;                    // center index per vertex
    std::vector<std::pair<int, int>> forest;     // (vertex, parent) BFS tree arcs
};

ClusterResult est_cluster(int n, const std::vector<std::vector<int>>& adj,
                          const std::vector<int>& delta) {
    const int max_delta = delta.empty() ? 0 : *std::max_element(delta.begin(), delta.end());
    // Dial-style buckets over key = d(u,v) - delta_u + max_delta >= 0.
    std::vector<long> key(static_cast<size_t>(n), std::numeric_limits<long>::max());
    std::vector<int> owner(static_cast<size_t>(n), -1);
    std::vector<int> parent(static_cast<size_t>(n), -1);
    std::vector<std::vector<int>> buckets(static_cast<size_t>(2 * max_delta + n + 2));

    for (int v = 0; v < n; ++v) {
        key[static_cast<size_t>(v)] = max_delta - delta[static_cast<size_t>(v)];
        owner[static_cast<size_t>(v)] = v;
        buckets[static_cast<size_t>(key[static_cast<size_t>(v)])].push_back(v);
    }
    for (size_t kb = 0; kb < buckets.size(); ++kb) {
        // Ties resolve inside the relaxation itself: equal key keeps the
        // smaller center id, the universal ordering of V.
        auto& bucket = buckets[kb];
        for (size_t idx = 0; idx < bucket.size(); ++idx) {
            const int u = bucket[idx];
            if (key[static_cast<size_t>(u)] != static_cast<long>(kb)) continue;
            for (int v : adj[static_cast<size_t>(u)]) {
                const long nk = static_cast<long>(kb) + 1;
                const int no = owner[static_cast<size_t>(u)];
                if (nk < key[static_cast<size_t>(v)] ||
                    (nk == key[static_cast<size_t>(v)] && no < owner[static_cast<size_t>(v)])) {
                    key[static_cast<size_t>(v)] = nk;
                    owner[static_cast<size_t>(v)] = no;
                    parent[static_cast<size_t>(v)] = u;
                    if (static_cast<size_t>(nk) < buckets.size())
                        buckets[static_cast<size_t>(nk)].push_back(v);
                }
            }
        }
    }
    ClusterResult res;
    res.cluster = std::move(owner);
    for (int v = 0; v < n; ++v)
        if (parent[static_cast<size_t>(v)] >= 0) res.forest.emplace_back(v, parent[static_cast<size_t>(v)]);
    return res;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<size_t>(a)] = b;
        return true;
    }
};

} // namespace

UltraSpanner build_ultra_spanner(const Graph& g, double k, std::uint64_t seed,
                                 const SpannerConfig& cfg) {
    if (k < 3.0) throw std::invalid_argument("build_ultra_spanner: k must be >= 3");
    const int n = g.vertex_count();
    const int m = g.edge_count();
    const double beta =
        std::min(cfg.beta_max, cfg.cluster_c * std::log(std::max(2.0, static_cast<double>(n))) / k);
    const int max_restarts =
        cfg.max_restarts >= 0 ? cfg.max_restarts
                              : static_cast<int>(std::ceil(std::log2(std::max(2.0, static_cast<double>(n)))));
    const double delta_cap = k / 6.0;

    // Weight classes of floor-to-power-of-k weights, relative to the minimum.
    const double wmin = std::max(g.min_weight(), std::numeric_limits<double>::min());
    std::vector<std::vector<EdgeId>> classes;
    for (EdgeId e = 0; e < m; ++e) {
        const double rel = g.edge(e).w / wmin;
        const int cls = std::max(0, static_cast<int>(std::floor(std::log(rel) / std::log(k) + 1e-12)));
        if (static_cast<size_t>(cls) >= classes.size()) classes.resize(static_cast<size_t>(cls) + 1);
        classes[static_cast<size_t>(cls)].push_back(e);
    }

    for (int attempt = 0; attempt <= max_restarts; ++attempt) {
        Rng rng = derive_rng(seed + static_cast<std::uint64_t>(attempt), 0x5fa7ULL);
        UltraSpanner out;
        out.k = k;
        out.beta = beta;
        out.rounds_used = attempt + 1;
        UnionFind contraction(n);
        bool failed = false;
        long inter_total = 0;

        for (const auto& cls_edges : classes) {
            if (cls_edges.empty()) continue;
            // Class graph: contract everything already spanned, snapshotting
            // each class edge's contracted endpoints before any new unions.
            std::vector<int> comp_of(static_cast<size_t>(n), -1);
            std::vector<VertexId> touched;
            std::vector<std::pair<int, int>> endpoints(cls_edges.size());
            for (size_t i = 0; i < cls_edges.size(); ++i) {
                const EdgeRec& r = g.edge(cls_edges[i]);
                int ids[2];
                int side = 0;
                for (VertexId x : {r.u, r.v}) {
                    const int root = contraction.find(x);
                    if (comp_of[static_cast<size_t>(root)] < 0) {
                        comp_of[static_cast<size_t>(root)] = static_cast<int>(touched.size());
                        touched.push_back(root);
                    }
                    ids[side++] = comp_of[static_cast<size_t>(root)];
                }
                endpoints[i] = {ids[0], ids[1]};
            }
            const int cn = static_cast<int>(touched.size());
            std::vector<std::vector<int>> adj(static_cast<size_t>(cn));
            std::vector<std::vector<std::pair<int, EdgeId>>> arc_edges(static_cast<size_t>(cn));
            for (size_t i = 0; i < cls_edges.size(); ++i) {
                const auto [a, b] = endpoints[i];
                if (a == b) continue; // already spanned inside a contracted blob
                adj[static_cast<size_t>(a)].push_back(b);
                adj[static_cast<size_t>(b)].push_back(a);
                arc_edges[static_cast<size_t>(a)].emplace_back(b, cls_edges[i]);
                arc_edges[static_cast<size_t>(b)].emplace_back(a, cls_edges[i]);
            }

            // Geometric shifts with support {0,1,...}: floor(ln U / ln(1-beta)).
            std::vector<int> delta(static_cast<size_t>(cn));
            for (int v = 0; v < cn; ++v) {
                const double u = std::max(rng.uniform01(), 1e-300);
                delta[static_cast<size_t>(v)] =
                    static_cast<int>(std::floor(std::log(u) / std::log(1.0 - beta)));
                if (delta[static_cast<size_t>(v)] > delta_cap) {
                    failed = true;
                    break;
                }
            }
            if (failed) break;

            const ClusterResult clusters = est_cluster(cn, adj, delta);

            // Intra: the per-cluster BFS forests, mapped back to concrete
            // class edges; only these merge components for later classes.
            for (auto [v, p] : clusters.forest) {
                EdgeId found = -1;
                for (auto [nbr, e] : arc_edges[static_cast<size_t>(v)])
                    if (nbr == p) {
                        found = e;
                        break;
                    }
                if (found >= 0) {
                    out.edges.push_back(found);
                    contraction.unite(touched[static_cast<size_t>(v)],
                                      touched[static_cast<size_t>(p)]);
                }
            }
            // Inter: every class edge whose snapshot endpoints landed in
            // different clusters.
            for (size_t i = 0; i < cls_edges.size(); ++i) {
                const auto [a, b] = endpoints[i];
                if (a == b) continue;
                if (clusters.cluster[static_cast<size_t>(a)] !=
                    clusters.cluster[static_cast<size_t>(b)]) {
                    out.edges.push_back(cls_edges[i]);
                    ++inter_total;
                }
            }
            if (static_cast<double>(inter_total) > 2.0 * beta * static_cast<double>(m)) {
                failed = true;
                break;
            }
        }
        if (!failed) {
            std::sort(out.edges.begin(), out.edges.end());
            out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
            return out;
        }
    }
    throw std::runtime_error("build_ultra_spanner: restart budget exhausted");
}

CoreDecomposition decompose_core(const Graph& g, const std::vector<EdgeId>& spanning_tree,
                                 VertexId s) {
    const int n = g.vertex_count();
    const int m = g.edge_count();
    if (!g.connected()) throw std::invalid_argument("decompose_core: graph must be connected");
    if (static_cast<int>(spanning_tree.size()) != n - 1)
        throw std::invalid_argument("decompose_core: tree does not span");

    CoreDecomposition dec;
    dec.excess = m - (n - 1);

    std::vector<char> in_tree(static_cast<size_t>(m), 0);
    for (EdgeId e : spanning_tree) in_tree[static_cast<size_t>(e)] = 1;
    std::vector<EdgeId> non_tree;
    for (EdgeId e = 0; e < m; ++e)
        if (!in_tree[static_cast<size_t>(e)]) non_tree.push_back(e);

    // S0: endpoints of non-tree edges plus the source.
    std::vector<char> in_s0(static_cast<size_t>(n), 0);
    in_s0[static_cast<size_t>(s)] = 1;
    for (EdgeId e : non_tree) {
        in_s0[static_cast<size_t>(g.edge(e).u)] = 1;
        in_s0[static_cast<size_t>(g.edge(e).v)] = 1;
    }
    int s0_count = 0;
    for (char c : in_s0) s0_count += c;

    // Tree adjacency and a rooted order from s.
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> tadj(static_cast<size_t>(n));
    for (EdgeId e : spanning_tree) {
        tadj[static_cast<size_t>(g.edge(e).u)].emplace_back(g.edge(e).v, e);
        tadj[static_cast<size_t>(g.edge(e).v)].emplace_back(g.edge(e).u, e);
    }
    std::vector<VertexId> order;
    std::vector<VertexId> parent(static_cast<size_t>(n), -1);
    std::vector<EdgeId> parent_edge(static_cast<size_t>(n), -1);
    {
        std::vector<VertexId> stack{s};
        std::vector<char> seen(static_cast<size_t>(n), 0);
        seen[static_cast<size_t>(s)] = 1;
        while (!stack.empty()) {
            VertexId u = stack.back();
            stack.pop_back();
            order.push_back(u);
            for (auto [v, e] : tadj[static_cast<size_t>(u)])
                if (!seen[static_cast<size_t>(v)]) {
                    seen[static_cast<size_t>(v)] = 1;
                    parent[static_cast<size_t>(v)] = u;
                    parent_edge[static_cast<size_t>(v)] = e;
                    stack.push_back(v);
                }
        }
    }

    // Subtree counts of S0 members; rooted at s, so the Steiner subtree T0 of
    // S0 is exactly the vertices with nonzero count that either are in S0 or
    // have counts strictly between 0 and |S0| ... more directly: v is in T0
    // iff N(v) >= 1 and v lies on a path between two S0 vertices, which under
    // root s (an S0 member) is N(v) >= 1 plus v in S0 or some strict child
    // count. Since s is the root and in S0, the union of root-to-S0 paths is
    // { v : N(v) >= 1 }.
    std::vector<int> cnt(static_cast<size_t>(n), 0);
    for (VertexId v = 0; v < n; ++v) cnt[static_cast<size_t>(v)] = in_s0[static_cast<size_t>(v)];
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (parent[static_cast<size_t>(*it)] >= 0)
            cnt[static_cast<size_t>(parent[static_cast<size_t>(*it)])] +=
                cnt[static_cast<size_t>(*it)];

    std::vector<char> in_t0(static_cast<size_t>(n), 0);
    for (VertexId v = 0; v < n; ++v) in_t0[static_cast<size_t>(v)] = cnt[static_cast<size_t>(v)] >= 1;

    // Degrees within T0.
    std::vector<int> t0_degree(static_cast<size_t>(n), 0);
    for (EdgeId e : spanning_tree) {
        if (in_t0[static_cast<size_t>(g.edge(e).u)] && in_t0[static_cast<size_t>(g.edge(e).v)]) {
            ++t0_degree[static_cast<size_t>(g.edge(e).u)];
            ++t0_degree[static_cast<size_t>(g.edge(e).v)];
        }
    }
    // S = S0 union S3 (degree >= 3 in T0).
    std::vector<char> in_core(static_cast<size_t>(n), 0);
    for (VertexId v = 0; v < n; ++v)
        in_core[static_cast<size_t>(v)] =
            in_t0[static_cast<size_t>(v)] && (in_s0[static_cast<size_t>(v)] || t0_degree[static_cast<size_t>(v)] >= 3);

    dec.original_to_core.assign(static_cast<size_t>(n), -1);
    for (VertexId v = 0; v < n; ++v)
        if (in_core[static_cast<size_t>(v)]) {
            dec.original_to_core[static_cast<size_t>(v)] =
                static_cast<int>(dec.core_to_original.size());
            dec.core_to_original.push_back(v);
        }

    // Contract maximal degree-2 paths of T0 between core vertices.
    std::vector<EdgeRec> core_edges;
    std::vector<char> edge_used(static_cast<size_t>(m), 0);
    for (VertexId start : dec.core_to_original) {
        for (auto [nbr, e0] : tadj[static_cast<size_t>(start)]) {
            if (!in_t0[static_cast<size_t>(nbr)] || edge_used[static_cast<size_t>(e0)]) continue;
            if (!(in_t0[static_cast<size_t>(start)] && in_t0[static_cast<size_t>(nbr)])) continue;
            // Walk away from `start` until the next core vertex.
            ContractedPath path;
            path.vertices.push_back(start);
            path.weights.clear();
            VertexId prev = start;
            VertexId cur = nbr;
            EdgeId cur_edge = e0;
            edge_used[static_cast<size_t>(e0)] = 1;
            path.weights.push_back(g.edge(e0).w);
            path.vertices.push_back(cur);
            while (!in_core[static_cast<size_t>(cur)]) {
                VertexId nxt = -1;
                EdgeId nxt_edge = -1;
                for (auto [w2, e2] : tadj[static_cast<size_t>(cur)]) {
                    if (w2 == prev || !in_t0[static_cast<size_t>(w2)]) continue;
                    if (!in_t0[static_cast<size_t>(cur)]) continue;
                    nxt = w2;
                    nxt_edge = e2;
                    break;
                }
                if (nxt < 0) throw std::runtime_error("decompose_core: broken degree-2 path");
                edge_used[static_cast<size_t>(nxt_edge)] = 1;
                path.weights.push_back(g.edge(nxt_edge).w);
                path.vertices.push_back(nxt);
                prev = cur;
                cur = nxt;
                cur_edge = nxt_edge;
            }
            (void)cur_edge;
            const int cu = dec.original_to_core[static_cast<size_t>(start)];
            const int cv = dec.original_to_core[static_cast<size_t>(cur)];
            double total = 0.0;
            for (double w2 : path.weights) total += w2;
            path.core_edge = static_cast<EdgeId>(core_edges.size());
            core_edges.push_back({cu, cv, total});
            dec.contracted_paths.push_back(std::move(path));
        }
    }
    // Non-tree edges join the core directly (endpoints are in S0).
    for (EdgeId e : non_tree) {
        const int cu = dec.original_to_core[static_cast<size_t>(g.edge(e).u)];
        const int cv = dec.original_to_core[static_cast<size_t>(g.edge(e).v)];
        if (cu < 0 || cv < 0) throw std::runtime_error("decompose_core: non-tree endpoint not in core");
        core_edges.push_back({cu, cv, g.edge(e).w});
    }
    dec.core = Graph(static_cast<int>(dec.core_to_original.size()), std::move(core_edges));

    // Forest: tree edges outside T0, grouped by attachment root in T0.
    std::map<VertexId, ForestComponent> comps; // keyed by component representative
    UnionFind uf(n);
    for (EdgeId e : spanning_tree) {
        const VertexId u = g.edge(e).u, v = g.edge(e).v;
        if (in_t0[static_cast<size_t>(u)] && in_t0[static_cast<size_t>(v)]) continue;
        uf.unite(u, v);
    }
    std::map<int, ForestComponent> by_root;
    for (EdgeId e : spanning_tree) {
        const VertexId u = g.edge(e).u, v = g.edge(e).v;
        if (in_t0[static_cast<size_t>(u)] && in_t0[static_cast<size_t>(v)]) continue;
        by_root[uf.find(u)].edges.push_back(e);
    }
    for (auto& [rep, comp] : by_root) {
        // The unique vertex of this component inside T0 is its root.
        comp.root = -1;
        for (EdgeId e : comp.edges)
            for (VertexId x : {g.edge(e).u, g.edge(e).v}) {
                if (in_t0[static_cast<size_t>(x)]) comp.root = x;
                else if (uf.find(x) == rep) comp.vertices.push_back(x);
            }
        std::sort(comp.vertices.begin(), comp.vertices.end());
        comp.vertices.erase(std::unique(comp.vertices.begin(), comp.vertices.end()),
                            comp.vertices.end());
        if (comp.root < 0) throw std::runtime_error("decompose_core: forest component without root");
        dec.forest_components.push_back(std::move(comp));
    }
    return dec;
}

SsspPotential extend_potential(const Graph& g, const CoreDecomposition& dec,
                               const SsspPotential& phi1, VertexId s) {
    const int n = g.vertex_count();
    if (static_cast<int>(phi1.base.values.size()) != dec.core.vertex_count())
        throw std::invalid_argument("extend_potential: core potential size mismatch");
    if (!validate_potential(dec.core, phi1.base))
        throw std::invalid_argument("extend_potential: core potential infeasible");

    SsspPotential out;
    out.alpha = phi1.alpha;
    out.source_set = {s};
    out.base.values.assign(static_cast<size_t>(n),
                           std::numeric_limits<double>::quiet_NaN());

    for (size_t cv = 0; cv < dec.core_to_original.size(); ++cv)
        out.base.values[static_cast<size_t>(dec.core_to_original[cv])] = phi1.base.values[cv];

    // Contracted paths: phi0(v_j) = min(phi(v_0) + prefix_j, phi(v_l) + suffix_j).
    for (const ContractedPath& path : dec.contracted_paths) {
        const double phi_a = out.base.values[static_cast<size_t>(path.vertices.front())];
        const double phi_b = out.base.values[static_cast<size_t>(path.vertices.back())];
        const size_t l = path.weights.size();
        double prefix = 0.0;
        std::vector<double> suffix(l + 1, 0.0);
        for (size_t i = l; i-- > 0;) suffix[i] = suffix[i + 1] + path.weights[i];
        for (size_t j = 1; j < path.vertices.size() - 1; ++j) {
            prefix += path.weights[j - 1];
            out.base.values[static_cast<size_t>(path.vertices[j])] =
                std::min(phi_a + prefix, phi_b + suffix[j]);
        }
    }

    // Forest components: phi(v) = phi(root) + exact tree distance.
    for (const ForestComponent& comp : dec.forest_components) {
        // BFS/DFS over this component's edges from the root, accumulating
        // weighted distances (each component is a tree).
        std::map<VertexId, std::vector<std::pair<VertexId, double>>> adj;
        for (EdgeId e : comp.edges) {
            adj[g.edge(e).u].emplace_back(g.edge(e).v, g.edge(e).w);
            adj[g.edge(e).v].emplace_back(g.edge(e).u, g.edge(e).w);
        }
        const double base = out.base.values[static_cast<size_t>(comp.root)];
        std::vector<std::pair<VertexId, double>> stack{{comp.root, base}};
        std::map<VertexId, char> seen{{comp.root, 1}};
        while (!stack.empty()) {
            auto [u, acc] = stack.back();
            stack.pop_back();
            for (auto [v, w2] : adj[u])
                if (!seen.count(v)) {
                    seen[v] = 1;
                    out.base.values[static_cast<size_t>(v)] = acc + w2;
                    stack.emplace_back(v, acc + w2);
                }
        }
    }

    for (double x : out.base.values)
        if (std::isnan(x)) throw std::runtime_error("extend_potential: uncovered vertex");
    return out;
}

SsspPotential sparsified_sssp_potential(const Graph& g, const std::vector<VertexId>& S,
                                        double alpha, const InnerSsspSolver& inner) {
    if (S.empty()) throw std::invalid_argument("sparsified_sssp_potential: empty source set");
    const int n = g.vertex_count();
    std::vector<char> in_s(static_cast<size_t>(n), 0);
    for (VertexId v : S) in_s[static_cast<size_t>(v)] = 1;

    SsspPotential out;
    out.alpha = alpha;
    out.source_set = S;

    // Map: contracted id; S collapses into vertex 0.
    std::vector<int> to_contracted(static_cast<size_t>(n), -1);
    std::vector<VertexId> from_contracted{-1}; // index 0 is the merged source
    for (VertexId v = 0; v < n; ++v) {
        if (in_s[static_cast<size_t>(v)]) to_contracted[static_cast<size_t>(v)] = 0;
        else {
            to_contracted[static_cast<size_t>(v)] = static_cast<int>(from_contracted.size());
            from_contracted.push_back(v);
        }
    }
    if (from_contracted.size() == 1) {
        out.base.values.assign(static_cast<size_t>(n), 0.0); // S = V
        return out;
    }

    // Parallel edges keep the minimum weight; intra-S edges vanish.
    std::map<std::pair<int, int>, double> best;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        int a = to_contracted[static_cast<size_t>(g.edge(e).u)];
        int b = to_contracted[static_cast<size_t>(g.edge(e).v)];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        auto [it, fresh] = best.try_emplace({a, b}, g.edge(e).w);
        if (!fresh) it->second = std::min(it->second, g.edge(e).w);
    }
    std::vector<EdgeRec> contracted_edges;
    contracted_edges.reserve(best.size());
    for (const auto& [key, w2] : best) contracted_edges.push_back({key.first, key.second, w2});
    Graph contracted(static_cast<int>(from_contracted.size()), std::move(contracted_edges));
    if (!contracted.connected())
        throw std::invalid_argument("sparsified_sssp_potential: graph must be connected");

    const auto tree = minimum_spanning_tree(contracted);
    CoreDecomposition dec = decompose_core(contracted, tree, 0);
    const int core_s = dec.original_to_core[0];
    SsspPotential phi1 = inner(dec.core, core_s);
    SsspPotential lifted = extend_potential(contracted, dec, phi1, 0);

    // Un-contract: every vertex of S takes the merged source value.
    out.base.values.assign(static_cast<size_t>(n), 0.0);
    const double source_value = lifted.base.values[0];
    for (VertexId v = 0; v < n; ++v)
        out.base.values[static_cast<size_t>(v)] =
            in_s[static_cast<size_t>(v)]
                ? source_value
                : lifted.base.values[static_cast<size_t>(to_contracted[static_cast<size_t>(v)])];
    return out;
}

} // namespace tsh
