#include "tsh/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace tsh {

Graph::Graph(int vertex_count, std::vector<EdgeRec> edges)
    : n_(vertex_count), edges_(std::move(edges)) {
    if (n_ < 0) throw std::invalid_argument("graph: negative vertex count");
    adj_.assign(static_cast<size_t>(n_), {});
    max_w_ = 0.0;
    min_w_ = edges_.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (EdgeId e = 0; e < static_cast<EdgeId>(edges_.size()); ++e) {
        const EdgeRec& r = edges_[static_cast<size_t>(e)];
        if (r.u < 0 || r.u >= n_ || r.v < 0 || r.v >= n_)
            throw std::invalid_argument("graph: endpoint out of range");
        if (r.u == r.v) throw std::invalid_argument("graph: self-loop");
        if (!(r.w > 0.0) || !std::isfinite(r.w))
            throw std::invalid_argument("graph: weight must be strictly positive");
        adj_[static_cast<size_t>(r.u)].emplace_back(r.v, e);
        adj_[static_cast<size_t>(r.v)].emplace_back(r.u, e);
        max_w_ = std::max(max_w_, r.w);
        min_w_ = std::min(min_w_, r.w);
    }
    connected_ = connected_components(*this).second <= 1;
}

double DemandVector::sum() const {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
}

double DemandVector::l1_norm() const {
    double s = 0.0;
    for (double x : values) s += std::abs(x);
    return s;
}

bool DemandVector::balanced(double tol) const { return std::abs(sum()) <= tol; }

bool DemandVector::integral(double tol) const {
    for (double x : values)
        if (std::abs(x - std::round(x)) > tol) return false;
    return true;
}

DemandVector divergence(const Graph& g, const Flow& f) {
    if (static_cast<int>(f.values.size()) != g.edge_count())
        throw std::invalid_argument("divergence: flow/edge index mismatch");
    DemandVector b;
    b.values.assign(static_cast<size_t>(g.vertex_count()), 0.0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& r = g.edge(e);
        const double fe = f.values[static_cast<size_t>(e)];
        b.values[static_cast<size_t>(r.v)] += fe;
        b.values[static_cast<size_t>(r.u)] -= fe;
    }
    return b;
}

double flow_cost(const Graph& g, const Flow& f) {
    if (static_cast<int>(f.values.size()) != g.edge_count())
        throw std::invalid_argument("flow_cost: flow/edge index mismatch");
    double c = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        c += g.edge(e).w * std::abs(f.values[static_cast<size_t>(e)]);
    return c;
}

std::vector<double> edge_difference(const Graph& g, const std::vector<double>& phi) {
    if (static_cast<int>(phi.size()) != g.vertex_count())
        throw std::invalid_argument("edge_difference: vertex index mismatch");
    std::vector<double> d(static_cast<size_t>(g.edge_count()));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& r = g.edge(e);
        d[static_cast<size_t>(e)] =
            phi[static_cast<size_t>(r.v)] - phi[static_cast<size_t>(r.u)];
    }
    return d;
}

bool validate_potential(const Graph& g, const Potential& phi, double tol_rel) {
    if (static_cast<int>(phi.values.size()) != g.vertex_count()) return false;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& r = g.edge(e);
        const double diff = std::abs(phi.values[static_cast<size_t>(r.u)] -
                                     phi.values[static_cast<size_t>(r.v)]);
        if (diff > r.w * (1.0 + tol_rel)) return false;
    }
    return true;
}

bool validate_sssp_potential(const Graph& g, const SsspPotential& p,
                             const std::vector<double>& exact_dist_from_S,
                             std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<int>(p.base.values.size()) != g.vertex_count())
        return fail("potential size mismatch");
    if (p.source_set.empty()) return fail("empty source set");
    if (p.alpha < 1.0) return fail("alpha < 1");

    const double source_value = p.base.values[static_cast<size_t>(p.source_set.front())];
    double scale = 1.0;
    for (double d : exact_dist_from_S)
        if (std::isfinite(d)) scale = std::max(scale, std::abs(d));
    const double tol = 1e-9 * scale;

    // Property (0): one value on all of S.
    for (VertexId s : p.source_set)
        if (std::abs(p.base.values[static_cast<size_t>(s)] - source_value) > tol)
            return fail("source values differ");
    // Property (1): phi(v) - phi(S) >= d(S,v)/alpha.
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const double d = exact_dist_from_S[static_cast<size_t>(v)];
        if (!std::isfinite(d)) continue;
        if (p.base.values[static_cast<size_t>(v)] - source_value < d / p.alpha - tol)
            return fail("distance lower bound violated at vertex " + std::to_string(v));
    }
    // Property (2): edge-Lipschitz.
    if (!validate_potential(g, p.base)) return fail("edge feasibility violated");
    return true;
}

ShortestPaths dijkstra(const Graph& g, const std::vector<VertexId>& sources) {
    if (sources.empty()) throw std::invalid_argument("dijkstra: empty source set");
    const double inf = std::numeric_limits<double>::infinity();
    ShortestPaths r;
    r.dist.assign(static_cast<size_t>(g.vertex_count()), inf);
    r.parent.assign(static_cast<size_t>(g.vertex_count()), -1);
    r.parent_edge.assign(static_cast<size_t>(g.vertex_count()), -1);

    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (VertexId s : sources) {
        if (s < 0 || s >= g.vertex_count())
            throw std::invalid_argument("dijkstra: source out of range");
        if (r.dist[static_cast<size_t>(s)] != 0.0) {
            r.dist[static_cast<size_t>(s)] = 0.0;
            pq.emplace(0.0, s);
        }
    }
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > r.dist[static_cast<size_t>(u)]) continue;
        for (auto [v, e] : g.adjacency(u)) {
            const double nd = d + g.edge(e).w;
            if (nd < r.dist[static_cast<size_t>(v)]) {
                r.dist[static_cast<size_t>(v)] = nd;
                r.parent[static_cast<size_t>(v)] = u;
                r.parent_edge[static_cast<size_t>(v)] = e;
                pq.emplace(nd, v);
            }
        }
    }
    return r;
}

std::pair<std::vector<int>, int> connected_components(const Graph& g) {
    std::vector<int> comp(static_cast<size_t>(g.vertex_count()), -1);
    int count = 0;
    std::vector<VertexId> stack;
    for (VertexId start = 0; start < g.vertex_count(); ++start) {
        if (comp[static_cast<size_t>(start)] >= 0) continue;
        comp[static_cast<size_t>(start)] = count;
        stack.push_back(start);
        while (!stack.empty()) {
            VertexId u = stack.back();
            stack.pop_back();
            for (auto [v, e] : g.adjacency(u)) {
                (void)e;
                if (comp[static_cast<size_t>(v)] < 0) {
                    comp[static_cast<size_t>(v)] = count;
                    stack.push_back(v);
                }
            }
        }
        ++count;
    }
    return {std::move(comp), count};
}

} // namespace tsh
