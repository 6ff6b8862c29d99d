#include "tsh/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace tsh {

OracleResult exact_transshipment(const Graph& g, const DemandVector& b, int size_cap) {
    if (static_cast<int>(b.values.size()) != g.vertex_count())
        throw std::invalid_argument("exact_transshipment: demand index mismatch");
    if (!b.balanced(demand_balance_tol(b) + 1e-12))
        throw std::invalid_argument("exact_transshipment: unbalanced demands");
    if (g.vertex_count() > size_cap)
        throw std::invalid_argument("exact_transshipment: instance above oracle size cap");
    if (!g.connected())
        throw std::invalid_argument("exact_transshipment: disconnected graph");

    const int n = g.vertex_count();
    const double inf = std::numeric_limits<double>::infinity();

    // Residual network on the bidirected graph. An undirected edge carries a
    // signed amount; the residual arc u->v has cost w and the reverse of a
    // loaded arc has cost -w with capacity equal to the load. Potentials pi
    // keep reduced costs nonnegative throughout.
    Flow flow;
    flow.values.assign(static_cast<size_t>(g.edge_count()), 0.0);
    std::vector<double> excess(b.values); // positive = still needs inflow
    std::vector<double> pi(static_cast<size_t>(n), 0.0);

    auto arc_cost = [&](EdgeId e, VertexId from) {
        // Traversing against at least that much load refunds the weight.
        const EdgeRec& r = g.edge(e);
        const double fe = flow.values[static_cast<size_t>(e)];
        const double load_with = (from == r.u) ? fe : -fe;
        return load_with < 0.0 ? -r.w : r.w;
    };

    const double tol = 1e-12 * std::max(1.0, b.l1_norm());

    for (;;) {
        std::vector<VertexId> sources, sinks;
        for (VertexId v = 0; v < n; ++v) {
            if (excess[static_cast<size_t>(v)] < -tol) sources.push_back(v);
            if (excess[static_cast<size_t>(v)] > tol) sinks.push_back(v);
        }
        if (sources.empty() && sinks.empty()) break;
        if (sources.empty() || sinks.empty())
            throw std::runtime_error("exact_transshipment: residual imbalance");

        // Dijkstra over reduced costs from all sources at once.
        std::vector<double> dist(static_cast<size_t>(n), inf);
        std::vector<EdgeId> parent_edge(static_cast<size_t>(n), -1);
        std::vector<VertexId> parent(static_cast<size_t>(n), -1);
        using Item = std::pair<double, VertexId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (VertexId s : sources) {
            dist[static_cast<size_t>(s)] = 0.0;
            pq.emplace(0.0, s);
        }
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[static_cast<size_t>(u)]) continue;
            for (auto [v, e] : g.adjacency(u)) {
                const double rc =
                    arc_cost(e, u) + pi[static_cast<size_t>(u)] - pi[static_cast<size_t>(v)];
                const double nd = d + std::max(0.0, rc);
                if (nd < dist[static_cast<size_t>(v)] - 1e-15) {
                    dist[static_cast<size_t>(v)] = nd;
                    parent[static_cast<size_t>(v)] = u;
                    parent_edge[static_cast<size_t>(v)] = e;
                    pq.emplace(nd, v);
                }
            }
        }

        VertexId best_sink = -1;
        double best = inf;
        for (VertexId t : sinks)
            if (dist[static_cast<size_t>(t)] < best) {
                best = dist[static_cast<size_t>(t)];
                best_sink = t;
            }
        if (best_sink < 0)
            throw std::runtime_error("exact_transshipment: sink unreachable");

        // Walk back to the reached source, then augment.
        VertexId cur = best_sink;
        std::vector<std::pair<VertexId, EdgeId>> path;
        while (parent[static_cast<size_t>(cur)] >= 0) {
            path.emplace_back(parent[static_cast<size_t>(cur)], parent_edge[static_cast<size_t>(cur)]);
            cur = parent[static_cast<size_t>(cur)];
        }
        const VertexId src = cur;
        double amount = std::min(-excess[static_cast<size_t>(src)],
                                 excess[static_cast<size_t>(best_sink)]);
        // Augmentations that traverse against existing load are limited by it.
        for (auto [from, e] : path) {
            const EdgeRec& r = g.edge(e);
            const double fe = flow.values[static_cast<size_t>(e)];
            const double load_against = (from == r.u) ? -fe : fe;
            if (load_against > tol) amount = std::min(amount, load_against);
        }
        if (amount <= tol)
            throw std::runtime_error("exact_transshipment: zero augmentation");
        for (auto [from, e] : path) {
            const EdgeRec& r = g.edge(e);
            flow.values[static_cast<size_t>(e)] += (from == r.u) ? amount : -amount;
        }
        excess[static_cast<size_t>(src)] += amount;
        excess[static_cast<size_t>(best_sink)] -= amount;

        // Capping at the augmenting distance keeps all reduced costs >= 0.
        for (VertexId v = 0; v < n; ++v)
            pi[static_cast<size_t>(v)] += std::min(dist[static_cast<size_t>(v)], best);
    }

    OracleResult res;
    res.opt_cost = flow_cost(g, flow);
    res.witness_flow = std::move(flow);
    Potential dual;
    dual.values = std::move(pi);
    // Shift so the minimum is zero; b . phi is shift-invariant for balanced b.
    double mn = *std::min_element(dual.values.begin(), dual.values.end());
    for (double& x : dual.values) x -= mn;
    res.witness_potential = std::move(dual);
    return res;
}

std::vector<std::vector<double>> exact_apsp(const Graph& g, int size_cap) {
    if (g.vertex_count() > size_cap)
        throw std::invalid_argument("exact_apsp: instance above oracle size cap");
    std::vector<std::vector<double>> d;
    d.reserve(static_cast<size_t>(g.vertex_count()));
    for (VertexId s = 0; s < g.vertex_count(); ++s)
        d.push_back(dijkstra(g, {s}).dist);
    return d;
}

Dyadic Dyadic::normalized() const {
    if (num == 0) return {0, 0};
    Dyadic r = *this;
    while ((r.num & 1) == 0) {
        r.num >>= 1;
        ++r.exp;
    }
    return r;
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    if (num == 0) return o;
    if (o.num == 0) return *this;
    const int e = std::min(exp, o.exp);
    const std::int64_t a = num << (exp - e);
    const std::int64_t b = o.num << (o.exp - e);
    return Dyadic{a + b, e}.normalized();
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + Dyadic{-o.num, o.exp}; }

bool Dyadic::operator==(const Dyadic& o) const {
    const Dyadic a = normalized(), b = o.normalized();
    return a.num == b.num && (a.num == 0 || a.exp == b.exp);
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(num), exp); }

LineRoutingResult line_routing_demo(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& demands, int max_level) {
    if (max_level < 0 || max_level > 60)
        throw std::invalid_argument("line_routing_demo: max_level out of range");
    const std::int64_t span = std::int64_t{1} << max_level;
    std::map<std::int64_t, Dyadic> b;
    for (auto [x, v] : demands) {
        if (x < 0 || x > span)
            throw std::invalid_argument("line_routing_demo: coordinate out of [0, 2^max_level]");
        b[x] = b[x] + Dyadic::from_int(v);
    }

    auto opt_doubled = [](const std::map<std::int64_t, Dyadic>& dm) {
        // 2 * sum over consecutive gaps of |prefix| * gap, all exact.
        Dyadic total{0, 0};
        Dyadic prefix{0, 0};
        std::int64_t prev = 0;
        bool first = true;
        for (const auto& [x, val] : dm) {
            if (!first && !prefix.is_zero()) {
                // |prefix| * (x - prev): multiply dyadic by integer gap.
                Dyadic p = prefix.abs();
                total = total + Dyadic{p.num * (x - prev), p.exp};
            }
            first = false;
            prev = x;
            prefix = prefix + val;
        }
        return total.times_pow2(1);
    };

    LineRoutingResult out;
    out.level_opt_costs.push_back(opt_doubled(b).to_double());

    for (int t = 1; t <= max_level; ++t) {
        const std::int64_t modulus = std::int64_t{1} << t;
        const std::int64_t half = std::int64_t{1} << (t - 1);
        std::map<std::int64_t, Dyadic> nb;
        Dyadic cost{0, 0};
        for (const auto& [x, val] : b) {
            if (val.is_zero()) continue;
            if (((x % modulus) + modulus) % modulus == half) {
                const Dyadic share = val.half();
                nb[x - half] = nb[x - half] + share;
                nb[x + half] = nb[x + half] + share;
                // both shares move distance 2^(t-1)
                cost = cost + val.abs().times_pow2(t - 1);
            } else {
                nb[x] = nb[x] + val;
            }
        }
        b = std::move(nb);
        out.iteration_costs.push_back(cost.to_double());
        out.total_cost += cost.to_double();
        out.level_opt_costs.push_back(opt_doubled(b).to_double());
    }
    // After max_level iterations all surviving mass sits on 0 and 2^max_level;
    // merging one end into the other completes the routing, and its cost is
    // bounded by the (never-increasing) per-level optimum.
    {
        Dyadic residual{0, 0};
        for (const auto& [x, val] : b)
            if (x == 0) residual = residual + val;
        if (!residual.is_zero()) {
            Dyadic moved = residual.abs().times_pow2(max_level);
            out.final_merge_cost = moved.to_double();
            out.total_cost += out.final_merge_cost;
        }
    }
    return out;
}

} // namespace tsh
