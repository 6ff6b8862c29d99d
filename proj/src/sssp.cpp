#include "tsh/sssp.hpp"

#include "tsh/oracle.hpp"
#include "tsh/rng.hpp"
#include "tsh/tree_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace tsh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct WalkDigraph {
    // arc[v] = next vertex toward the sink side (s carries a self-loop).
    std::vector<VertexId> arc;
    std::vector<EdgeId> arc_edge;  // -1 for the self-loop
    std::vector<double> arc_w;
    std::vector<char> sampled;
};

// Samples the one-out functional digraph: every vertex with positive inflow
// picks an incoming flow arc with probability proportional to its carry.
// Walk arcs point from receivers toward emitters, i.e. against the flow.
WalkDigraph sample_walk_digraph(const Graph& g, const Flow& f, VertexId s, Rng& rng) {
    const int n = g.vertex_count();
    WalkDigraph d;
    d.arc.assign(static_cast<size_t>(n), -1);
    d.arc_edge.assign(static_cast<size_t>(n), -1);
    d.arc_w.assign(static_cast<size_t>(n), 0.0);
    d.sampled.assign(static_cast<size_t>(n), 0);

    for (VertexId v = 0; v < n; ++v) {
        if (v == s) continue;
        double inflow = 0.0;
        for (auto [w, e] : g.adjacency(v)) {
            (void)w;
            const EdgeRec& r = g.edge(e);
            const double fe = f.values[static_cast<size_t>(e)];
            if (v == r.v && fe > 0.0) inflow += fe;
            if (v == r.u && fe < 0.0) inflow += -fe;
        }
        if (inflow <= 0.0) continue;
        double pick = rng.uniform01() * inflow;
        for (auto [w, e] : g.adjacency(v)) {
            const EdgeRec& r = g.edge(e);
            const double fe = f.values[static_cast<size_t>(e)];
            double amount = 0.0;
            if (v == r.v && fe > 0.0) amount = fe;
            if (v == r.u && fe < 0.0) amount = -fe;
            if (amount <= 0.0) continue;
            pick -= amount;
            if (pick <= 0.0) {
                d.arc[static_cast<size_t>(v)] = w;
                d.arc_edge[static_cast<size_t>(v)] = e;
                d.arc_w[static_cast<size_t>(v)] = r.w;
                d.sampled[static_cast<size_t>(v)] = 1;
                break;
            }
        }
        if (!d.sampled[static_cast<size_t>(v)]) {
            // Rounding left the pick unassigned; take the last carrier.
            for (auto it = g.adjacency(v).rbegin(); it != g.adjacency(v).rend(); ++it) {
                const EdgeRec& r = g.edge(it->second);
                const double fe = f.values[static_cast<size_t>(it->second)];
                const bool carries = (v == r.v && fe > 0.0) || (v == r.u && fe < 0.0);
                if (carries) {
                    d.arc[static_cast<size_t>(v)] = it->first;
                    d.arc_edge[static_cast<size_t>(v)] = it->second;
                    d.arc_w[static_cast<size_t>(v)] = r.w;
                    d.sampled[static_cast<size_t>(v)] = 1;
                    break;
                }
            }
        }
    }
    d.arc[static_cast<size_t>(s)] = s; // zero-weight self-loop
    d.arc_edge[static_cast<size_t>(s)] = -1;
    d.arc_w[static_cast<size_t>(s)] = 0.0;
    d.sampled[static_cast<size_t>(s)] = 1;
    return d;
}

struct Components {
    std::vector<int> comp;          // -1 for unsampled vertices
    int count = 0;
    std::vector<char> on_cycle;
    std::vector<double> cycle_weight;   // c(C) per component
    std::vector<double> dist_to_cycle;  // along arcs, 0 on the cycle
    std::vector<VertexId> members_head; // representative (smallest id)
};

Components find_components(const WalkDigraph& d, int n) {
    Components c;
    c.comp.assign(static_cast<size_t>(n), -1);
    c.on_cycle.assign(static_cast<size_t>(n), 0);
    c.dist_to_cycle.assign(static_cast<size_t>(n), 0.0);

    std::vector<int> state(static_cast<size_t>(n), 0); // 0 new, 1 in-progress, 2 done
    for (VertexId start = 0; start < n; ++start) {
        if (!d.sampled[static_cast<size_t>(start)] || state[static_cast<size_t>(start)] != 0)
            continue;
        std::vector<VertexId> path;
        VertexId u = start;
        while (state[static_cast<size_t>(u)] == 0) {
            state[static_cast<size_t>(u)] = 1;
            path.push_back(u);
            u = d.arc[static_cast<size_t>(u)];
        }
        if (state[static_cast<size_t>(u)] == 1) {
            // New cycle discovered along the current path.
            const int id = c.count++;
            c.cycle_weight.push_back(0.0);
            c.members_head.push_back(u);
            bool in_cycle = false;
            for (VertexId v : path) {
                if (v == u) in_cycle = true;
                if (in_cycle) {
                    c.on_cycle[static_cast<size_t>(v)] = 1;
                    c.comp[static_cast<size_t>(v)] = id;
                    c.cycle_weight[static_cast<size_t>(id)] += d.arc_w[static_cast<size_t>(v)];
                }
            }
        }
        const int id = c.comp[static_cast<size_t>(u)];
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            state[static_cast<size_t>(*it)] = 2;
            if (c.comp[static_cast<size_t>(*it)] < 0) c.comp[static_cast<size_t>(*it)] = id;
        }
    }
    // Distances to the cycle along arcs, resolved by chasing memoized tails.
    for (VertexId v = 0; v < n; ++v) {
        if (c.comp[static_cast<size_t>(v)] < 0 || c.on_cycle[static_cast<size_t>(v)]) continue;
        std::vector<VertexId> chain;
        VertexId u = v;
        while (!c.on_cycle[static_cast<size_t>(u)] && c.dist_to_cycle[static_cast<size_t>(u)] == 0.0) {
            chain.push_back(u);
            u = d.arc[static_cast<size_t>(u)];
        }
        double acc = c.dist_to_cycle[static_cast<size_t>(u)];
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            acc += d.arc_w[static_cast<size_t>(*it)];
            c.dist_to_cycle[static_cast<size_t>(*it)] = acc;
        }
    }
    return c;
}

EsssTree expected_sssp_impl(const Graph& g, VertexId s, const DemandVector& b, double eps_level,
                            const RecTsSolver& solver, std::uint64_t seed, int depth,
                            const Flow* top_flow) {
    const int n = g.vertex_count();
    EsssTree tree;
    tree.root = s;
    if (n <= 1) return tree;
    if (depth > 2 * static_cast<int>(std::log2(std::max(2, n))) + 8)
        throw std::runtime_error("expected_sssp: recursion depth exceeded");

    const double tol = demand_balance_tol(b) + 1e-12;
    for (VertexId v = 0; v < n; ++v)
        if (v != s && b.values[static_cast<size_t>(v)] < -tol)
            throw std::invalid_argument("expected_sssp: negative demand off the source");
    if (b.l1_norm() <= tol) return tree;

    // Level flow: shared from the caller at the top, solved here otherwise.
    Flow f;
    if (top_flow != nullptr) {
        f = *top_flow;
    } else {
        f = solver(g, b, eps_level);
    }
    {
        // Contract check: acyclic support.
        Flow cancelled = cancel_flow_cycles(g, f);
        double diff = 0.0;
        for (size_t i = 0; i < f.values.size(); ++i)
            diff += std::abs(cancelled.values[i] - f.values[i]);
        if (diff > 1e-7 * std::max(1.0, flow_cost(g, f)))
            throw std::invalid_argument("expected_sssp: solver flow has cyclic support");
        f = std::move(cancelled);
    }

    Rng rng = derive_rng(seed, 0xe555ULL, static_cast<std::uint64_t>(depth));
    const WalkDigraph d = sample_walk_digraph(g, f, s, rng);
    const Components comps = find_components(d, n);

    // Recursive instance: one vertex per component carrying its total demand;
    // edges between components get the composite weight through the cycles.
    const int cn = comps.count;
    DemandVector bp;
    bp.values.assign(static_cast<size_t>(cn), 0.0);
    for (VertexId v = 0; v < n; ++v)
        if (comps.comp[static_cast<size_t>(v)] >= 0)
            bp.values[static_cast<size_t>(comps.comp[static_cast<size_t>(v)])] +=
                b.values[static_cast<size_t>(v)];

    struct BestEdge {
        double w = kInf;
        EdgeId orig = -1;
    };
    std::map<std::pair<int, int>, BestEdge> best;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& r = g.edge(e);
        int a = comps.comp[static_cast<size_t>(r.u)];
        int bcomp = comps.comp[static_cast<size_t>(r.v)];
        if (a < 0 || bcomp < 0 || a == bcomp) continue;
        const double w = r.w + comps.dist_to_cycle[static_cast<size_t>(r.u)] +
                         comps.dist_to_cycle[static_cast<size_t>(r.v)] +
                         comps.cycle_weight[static_cast<size_t>(a)] +
                         comps.cycle_weight[static_cast<size_t>(bcomp)];
        if (a > bcomp) std::swap(a, bcomp);
        BestEdge& slot = best[{a, bcomp}];
        if (w < slot.w) slot = BestEdge{w, e};
    }

    const int s_comp = comps.comp[static_cast<size_t>(s)];

    // Assemble this level's contribution: all sampled arcs except one arc per
    // cycle (the self-loop at s is no real edge, so dropping it is free).
    std::vector<char> edge_in_tree(static_cast<size_t>(g.edge_count()), 0);
    std::vector<char> cycle_cut(static_cast<size_t>(cn), 0);
    for (VertexId v = 0; v < n; ++v) {
        const int cid = comps.comp[static_cast<size_t>(v)];
        if (cid < 0) continue;
        const EdgeId e = d.arc_edge[static_cast<size_t>(v)];
        if (e < 0) continue; // self-loop at s
        if (comps.on_cycle[static_cast<size_t>(v)] && !cycle_cut[static_cast<size_t>(cid)] &&
            comps.members_head[static_cast<size_t>(cid)] == v) {
            cycle_cut[static_cast<size_t>(cid)] = 1; // drop one cycle arc
            continue;
        }
        edge_in_tree[static_cast<size_t>(e)] = 1;
    }

    if (cn > 1) {
        std::vector<EdgeRec> pedges;
        std::vector<EdgeId> orig_of;
        for (const auto& [key, be] : best) {
            pedges.push_back({key.first, key.second, be.w});
            orig_of.push_back(be.orig);
        }
        Graph gp(cn, std::move(pedges));

        // Only the part containing s can carry demand: a connected part of
        // the component graph with no emitter has all-nonnegative balanced
        // demands, hence zero. Restrict the recursion to s's part.
        auto [part, part_count] = connected_components(gp);
        if (part_count > 1) {
            std::vector<int> to_sub(static_cast<size_t>(cn), -1);
            std::vector<int> from_sub;
            const int want = part[static_cast<size_t>(s_comp)];
            for (int v = 0; v < cn; ++v)
                if (part[static_cast<size_t>(v)] == want) {
                    to_sub[static_cast<size_t>(v)] = static_cast<int>(from_sub.size());
                    from_sub.push_back(v);
                }
            std::vector<EdgeRec> sedges;
            std::vector<EdgeId> sorig;
            for (EdgeId e = 0; e < gp.edge_count(); ++e) {
                const EdgeRec& r = gp.edge(e);
                if (part[static_cast<size_t>(r.u)] != want) continue;
                sedges.push_back({to_sub[static_cast<size_t>(r.u)], to_sub[static_cast<size_t>(r.v)], r.w});
                sorig.push_back(orig_of[static_cast<size_t>(e)]);
            }
            DemandVector bsub;
            bsub.values.resize(from_sub.size());
            for (size_t i = 0; i < from_sub.size(); ++i)
                bsub.values[i] = bp.values[static_cast<size_t>(from_sub[i])];
            Graph gsub(static_cast<int>(from_sub.size()), std::move(sedges));
            EsssTree sub = expected_sssp_impl(gsub, to_sub[static_cast<size_t>(s_comp)], bsub,
                                              eps_level, solver, seed + 0x9e37ULL, depth + 1,
                                              nullptr);
            for (EdgeId e : sub.edges) edge_in_tree[static_cast<size_t>(sorig[static_cast<size_t>(e)])] = 1;
        } else {
            EsssTree sub = expected_sssp_impl(gp, s_comp, bp, eps_level, solver,
                                              seed + 0x9e37ULL, depth + 1, nullptr);
            for (EdgeId e : sub.edges) edge_in_tree[static_cast<size_t>(orig_of[static_cast<size_t>(e)])] = 1;
        }
    }

    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (edge_in_tree[static_cast<size_t>(e)]) tree.edges.push_back(e);
    return tree;
}

} // namespace

std::vector<double> tree_distances(const Graph& g, const EsssTree& tree,
                                   std::vector<VertexId>* parent,
                                   std::vector<EdgeId>* parent_edge) {
    const int n = g.vertex_count();
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj(static_cast<size_t>(n));
    for (EdgeId e : tree.edges) {
        adj[static_cast<size_t>(g.edge(e).u)].emplace_back(g.edge(e).v, e);
        adj[static_cast<size_t>(g.edge(e).v)].emplace_back(g.edge(e).u, e);
    }
    std::vector<double> dist(static_cast<size_t>(n), kInf);
    if (parent) parent->assign(static_cast<size_t>(n), -1);
    if (parent_edge) parent_edge->assign(static_cast<size_t>(n), -1);
    dist[static_cast<size_t>(tree.root)] = 0.0;
    std::vector<VertexId> stack{tree.root};
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        for (auto [v, e] : adj[static_cast<size_t>(u)]) {
            if (dist[static_cast<size_t>(v)] != kInf) continue;
            dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + g.edge(e).w;
            if (parent) (*parent)[static_cast<size_t>(v)] = u;
            if (parent_edge) (*parent_edge)[static_cast<size_t>(v)] = e;
            stack.push_back(v);
        }
    }
    return dist;
}

EsssTree expected_sssp(const Graph& g, VertexId s, const DemandVector& b, double eps,
                       const RecTsSolver& solver, std::uint64_t seed, const Flow* top_flow) {
    if (static_cast<int>(b.values.size()) != g.vertex_count())
        throw std::invalid_argument("expected_sssp: demand index mismatch");
    const double log2n = std::log2(std::max(2.0, static_cast<double>(g.vertex_count())));
    // Per-level accuracy: (1 + 3 eps_level)^ceil(log2 n) <= e^eps <= 1 + 2 eps.
    const double eps_level = eps / (3.0 * std::ceil(log2n));
    return expected_sssp_impl(g, s, b, eps_level, solver, seed, 0, top_flow);
}

SsspResult sssp_from_transshipment(const Graph& g, VertexId s, double eps,
                                   const PairSolver& pair_solver, const RecTsSolver& rec_solver,
                                   std::uint64_t seed, double loop_cap_c) {
    if (!g.connected())
        throw std::invalid_argument("sssp_from_transshipment: graph must be connected");
    const int n = g.vertex_count();

    SsspResult out;
    out.source = s;
    out.parent.assign(static_cast<size_t>(n), -1);
    out.parent_edge.assign(static_cast<size_t>(n), -1);
    out.dist.assign(static_cast<size_t>(n), kInf);
    out.dist[static_cast<size_t>(s)] = 0.0;
    out.potential.base.values.assign(static_cast<size_t>(n), 0.0);
    out.potential.source_set = {s};
    out.potential.alpha = 1.0 + eps;
    if (n == 1) return out;

    const double aspect =
        g.max_weight() * static_cast<double>(n) / std::max(g.min_weight(), 1e-300);
    const int loop_cap = static_cast<int>(std::ceil(
        loop_cap_c * std::pow(std::log2(std::max(4.0, static_cast<double>(n) * aspect)), 2.0)));

    std::vector<char> active(static_cast<size_t>(n), 1);
    active[static_cast<size_t>(s)] = 0;
    int active_count = n - 1;

    for (int loop = 0; loop < loop_cap && active_count > 0; ++loop) {
        out.loops = loop + 1;
        DemandVector b;
        b.values.assign(static_cast<size_t>(n), 0.0);
        for (VertexId v = 0; v < n; ++v)
            if (active[static_cast<size_t>(v)]) {
                b.values[static_cast<size_t>(v)] = 1.0;
                b.values[static_cast<size_t>(s)] -= 1.0;
            }

        // One solve per iteration: the pair provides the removal potential and
        // its flow seeds the expected tree.
        SolveReport pair = pair_solver(b, eps / 10.0);
        out.solver_iterations += pair.iterations;
        Flow acyclic = cancel_flow_cycles(g, pair.flow);
        EsssTree tree = expected_sssp(g, s, b, eps / 10.0, rec_solver,
                                      seed + 0xb1ULL * static_cast<std::uint64_t>(loop + 1),
                                      &acyclic);

        std::vector<VertexId> tparent;
        std::vector<EdgeId> tparent_edge;
        const std::vector<double> dt = tree_distances(g, tree, &tparent, &tparent_edge);

        // Relax d*/p* along every tree vertex in distance order so the
        // parent invariant d*(p*(v)) < d*(v) survives each update.
        std::vector<VertexId> order;
        for (VertexId v = 0; v < n; ++v)
            if (v != s && std::isfinite(dt[static_cast<size_t>(v)])) order.push_back(v);
        std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b2) {
            return dt[static_cast<size_t>(a)] < dt[static_cast<size_t>(b2)];
        });
        for (VertexId v : order) {
            if (dt[static_cast<size_t>(v)] < out.dist[static_cast<size_t>(v)]) {
                out.dist[static_cast<size_t>(v)] = dt[static_cast<size_t>(v)];
                out.parent[static_cast<size_t>(v)] = tparent[static_cast<size_t>(v)];
                out.parent_edge[static_cast<size_t>(v)] = tparent_edge[static_cast<size_t>(v)];
            }
        }

        // Fold the potential in: normalize phi(s) = 0, then coordinatewise max
        // (feasibility is closed under max).
        const double phis = pair.potential.values[static_cast<size_t>(s)];
        auto& phistar = out.potential.base.values;
        for (VertexId v = 0; v < n; ++v)
            phistar[static_cast<size_t>(v)] =
                std::max(phistar[static_cast<size_t>(v)],
                         pair.potential.values[static_cast<size_t>(v)] - phis);

        for (VertexId v = 0; v < n; ++v) {
            if (!active[static_cast<size_t>(v)]) continue;
            if (dt[static_cast<size_t>(v)] <=
                (1.0 + eps) * phistar[static_cast<size_t>(v)] + 1e-12) {
                active[static_cast<size_t>(v)] = 0;
                --active_count;
            }
        }
    }
    if (active_count > 0) {
        std::string who;
        for (VertexId v = 0; v < n; ++v)
            if (active[static_cast<size_t>(v)]) who += " " + std::to_string(v);
        throw std::runtime_error("sssp_from_transshipment: loop cap exceeded; remaining:" + who);
    }
    return out;
}

} // namespace tsh
