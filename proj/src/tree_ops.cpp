#include "tsh/tree_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsh {

namespace {

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

std::vector<EdgeId> minimum_spanning_tree(const Graph& g) {
    if (!g.connected()) throw std::invalid_argument("minimum_spanning_tree: disconnected input");
    std::vector<EdgeId> order(static_cast<size_t>(g.edge_count()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
        const double wa = g.edge(a).w, wb = g.edge(b).w;
        return wa != wb ? wa < wb : a < b;
    });
    UnionFind uf(g.vertex_count());
    std::vector<EdgeId> tree;
    tree.reserve(static_cast<size_t>(g.vertex_count() > 0 ? g.vertex_count() - 1 : 0));
    for (EdgeId e : order)
        if (uf.unite(g.edge(e).u, g.edge(e).v)) tree.push_back(e);
    return tree;
}

Flow route_on_tree(const Graph& g, const std::vector<EdgeId>& tree, const DemandVector& b) {
    if (static_cast<int>(b.values.size()) != g.vertex_count())
        throw std::invalid_argument("route_on_tree: demand index mismatch");
    if (!b.balanced(demand_balance_tol(b) + 1e-12))
        throw std::invalid_argument("route_on_tree: demands not balanced");

    const int n = g.vertex_count();
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> tadj(static_cast<size_t>(n));
    for (EdgeId e : tree) {
        tadj[static_cast<size_t>(g.edge(e).u)].emplace_back(g.edge(e).v, e);
        tadj[static_cast<size_t>(g.edge(e).v)].emplace_back(g.edge(e).u, e);
    }

    Flow f;
    f.values.assign(static_cast<size_t>(g.edge_count()), 0.0);
    if (n == 0) return f;

    // Iterative post-order per component; the net demand of each subtree is
    // exactly the flow its parent edge must carry inward.
    std::vector<char> visited(static_cast<size_t>(n), 0);
    std::vector<double> subtree(b.values);
    std::vector<VertexId> order;
    std::vector<std::pair<VertexId, EdgeId>> parent(static_cast<size_t>(n), {-1, -1});
    order.reserve(static_cast<size_t>(n));
    for (VertexId root = 0; root < n; ++root) {
        if (visited[static_cast<size_t>(root)]) continue;
        std::vector<VertexId> stack{root};
        visited[static_cast<size_t>(root)] = 1;
        while (!stack.empty()) {
            VertexId u = stack.back();
            stack.pop_back();
            order.push_back(u);
            for (auto [v, e] : tadj[static_cast<size_t>(u)]) {
                if (visited[static_cast<size_t>(v)]) continue;
                visited[static_cast<size_t>(v)] = 1;
                parent[static_cast<size_t>(v)] = {u, e};
                stack.push_back(v);
            }
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VertexId v = *it;
        auto [p, e] = parent[static_cast<size_t>(v)];
        if (p < 0) continue;
        const double need = subtree[static_cast<size_t>(v)]; // net inflow the subtree needs
        const EdgeRec& r = g.edge(e);
        f.values[static_cast<size_t>(e)] = (r.u == p) ? need : -need;
        subtree[static_cast<size_t>(p)] += need;
    }
    return f;
}

SsspPotential tree_sssp_potential(const Graph& tree_graph, const std::vector<VertexId>& sources) {
    if (tree_graph.edge_count() != tree_graph.vertex_count() - 1 || !tree_graph.connected())
        throw std::invalid_argument("tree_sssp_potential: input is not a tree");
    if (sources.empty()) throw std::invalid_argument("tree_sssp_potential: empty source set");
    ShortestPaths sp = dijkstra(tree_graph, sources);
    SsspPotential p;
    p.base.values = std::move(sp.dist);
    p.source_set = sources;
    p.alpha = 1.0;
    return p;
}

Flow cancel_flow_cycles(const Graph& g, Flow f) {
    const int n = g.vertex_count();
    const double scale = [&] {
        double m = 0.0;
        for (double x : f.values) m = std::max(m, std::abs(x));
        return m;
    }();
    const double zero_tol = scale * 1e-14;

    auto arc_flow = [&](EdgeId e, VertexId from) {
        const EdgeRec& r = g.edge(e);
        const double fe = f.values[static_cast<size_t>(e)];
        return (from == r.u) ? fe : -fe;
    };

    // Walk forward along positive arcs; a revisited vertex on the current walk
    // closes a directed cycle, which we cancel by its minimum arc flow. A
    // vertex with no remaining out-arc can never lie on a cycle, so it is
    // marked dead for good. Each cancellation zeroes at least one arc.
    std::vector<char> dead(static_cast<size_t>(n), 0);
    std::vector<int> pos_on_walk(static_cast<size_t>(n), -1);
    std::vector<VertexId> walk;
    std::vector<EdgeId> walk_arcs; // walk_arcs[i] leads from walk[i] to walk[i+1]

    auto next_arc = [&](VertexId u) -> EdgeId {
        for (auto [v, e] : g.adjacency(u)) {
            if (dead[static_cast<size_t>(v)]) continue;
            if (arc_flow(e, u) > zero_tol) return e;
        }
        return -1;
    };

    for (VertexId start = 0; start < n; ++start) {
        if (dead[static_cast<size_t>(start)]) continue;
        walk.assign(1, start);
        walk_arcs.clear();
        pos_on_walk[static_cast<size_t>(start)] = 0;
        while (!walk.empty()) {
            const VertexId u = walk.back();
            const EdgeId e = next_arc(u);
            if (e < 0) {
                dead[static_cast<size_t>(u)] = 1;
                pos_on_walk[static_cast<size_t>(u)] = -1;
                walk.pop_back();
                if (!walk_arcs.empty()) walk_arcs.pop_back();
                continue;
            }
            const EdgeRec& r = g.edge(e);
            const VertexId v = (r.u == u) ? r.v : r.u;
            const int prev = pos_on_walk[static_cast<size_t>(v)];
            if (prev >= 0) {
                double cancel = arc_flow(e, u);
                for (size_t i = static_cast<size_t>(prev); i < walk_arcs.size(); ++i)
                    cancel = std::min(cancel, arc_flow(walk_arcs[i], walk[i]));
                auto reduce = [&](EdgeId ce, VertexId from) {
                    const EdgeRec& cr = g.edge(ce);
                    f.values[static_cast<size_t>(ce)] -= (from == cr.u) ? cancel : -cancel;
                    if (std::abs(f.values[static_cast<size_t>(ce)]) <= zero_tol)
                        f.values[static_cast<size_t>(ce)] = 0.0;
                };
                for (size_t i = static_cast<size_t>(prev); i < walk_arcs.size(); ++i)
                    reduce(walk_arcs[i], walk[i]);
                reduce(e, u);
                // Truncate the walk back to v and continue from there.
                while (static_cast<int>(walk.size()) > prev + 1) {
                    pos_on_walk[static_cast<size_t>(walk.back())] = -1;
                    walk.pop_back();
                    walk_arcs.pop_back();
                }
            } else {
                pos_on_walk[static_cast<size_t>(v)] = static_cast<int>(walk.size());
                walk.push_back(v);
                walk_arcs.push_back(e);
            }
        }
    }
    for (double& x : f.values)
        if (std::abs(x) <= zero_tol) x = 0.0;
    return f;
}

std::pair<Graph, AspectReport> normalize_aspect_ratio(const Graph& g, const DemandVector& b) {
    if (!b.integral()) throw std::invalid_argument("normalize_aspect_ratio: demands not integral");
    if (!b.balanced(demand_balance_tol(b) + 1e-12))
        throw std::invalid_argument("normalize_aspect_ratio: demands not balanced");

    AspectReport rep;
    rep.kept_edge_ids.resize(static_cast<size_t>(g.edge_count()));
    std::iota(rep.kept_edge_ids.begin(), rep.kept_edge_ids.end(), 0);

    double max_abs_b = 0.0;
    for (double x : b.values) max_abs_b = std::max(max_abs_b, std::abs(x));
    if (max_abs_b == 0.0) {
        rep.degenerate = true;
        return {g, rep};
    }

    const auto mst = minimum_spanning_tree(g);
    rep.z = flow_cost(g, route_on_tree(g, mst, b));
    if (rep.z == 0.0) {
        rep.degenerate = true;
        return {g, rep};
    }

    const double n = static_cast<double>(g.vertex_count());
    // C with M <= n^C, computed from the actual demand magnitude.
    rep.exponent_c = static_cast<int>(
        std::ceil(std::log(std::max(2.0, max_abs_b)) / std::log(std::max(2.0, n))));
    rep.shift = rep.z / std::pow(n, rep.exponent_c + 5);

    std::vector<EdgeRec> kept;
    rep.kept_edge_ids.clear();
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& r = g.edge(e);
        if (r.w > rep.z) {
            ++rep.deleted_edges;
            continue;
        }
        kept.push_back({r.u, r.v, r.w + rep.shift});
        rep.kept_edge_ids.push_back(e);
    }
    return {Graph(g.vertex_count(), std::move(kept)), rep};
}

} // namespace tsh
