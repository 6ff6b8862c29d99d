#include "tsh/pipeline.hpp"

#include "tsh/oracle.hpp"
#include "tsh/rng.hpp"
#include "tsh/tree_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace tsh {

namespace {

SsspResult dijkstra_sssp_result(const Graph& g, VertexId s) {
    ShortestPaths sp = dijkstra(g, {s});
    SsspResult r;
    r.source = s;
    r.parent = std::move(sp.parent);
    r.parent_edge = std::move(sp.parent_edge);
    r.potential.base.values = sp.dist;
    r.potential.source_set = {s};
    r.potential.alpha = 1.0;
    r.dist = std::move(sp.dist);
    return r;
}

PotentialOracle make_embedding_oracle(const Graph& h, const PipelineConfig& cfg, int depth) {
    const int n = h.vertex_count();
    const double log2n = std::log2(std::max(2.0, static_cast<double>(n)));
    if (h.edge_count() <= cfg.base_threshold || depth >= cfg.max_depth) {
        return [](const Graph& g, const std::vector<VertexId>& S) {
            return exact_potential_oracle(g, S);
        };
    }
    const double alpha = 1.0 + 1.0 / log2n;
    const double inner_eps = 1.0 / log2n;
    PipelineConfig inner_cfg = cfg;
    return [inner_cfg, alpha, inner_eps, depth](const Graph& g, const std::vector<VertexId>& S) {
        InnerSsspSolver inner = [&](const Graph& core, VertexId cs) {
            SsspResult r = recursive_sssp(core, cs, inner_eps, inner_cfg, depth + 1);
            return r.potential;
        };
        return sparsified_sssp_potential(g, S, alpha, inner);
    };
}

} // namespace

RoutingBundle build_routing_bundle(const Graph& g, const PipelineConfig& cfg, int depth) {
    const int n = g.vertex_count();
    const double log2n = std::log2(std::max(2.0, static_cast<double>(n)));

    // Edge-sparsify first: the embedding runs on the spanner, whose stretch
    // folds into the measured distortion.
    const Graph* embed_graph = &g;
    Graph spanner_graph;
    if (g.edge_count() > cfg.base_threshold) {
        const double k = cfg.spanner_k > 0.0 ? cfg.spanner_k : 4.0 * std::ceil(log2n);
        SpannerConfig scfg;
        scfg.cluster_c = cfg.spanner_cluster_c;
        UltraSpanner sp = build_ultra_spanner(g, k, cfg.seed + 0x57ULL, scfg);
        std::vector<EdgeRec> edges;
        edges.reserve(sp.edges.size());
        for (EdgeId e : sp.edges) edges.push_back(g.edge(e));
        spanner_graph = Graph(n, std::move(edges));
        embed_graph = &spanner_graph;
    }

    BourgainParams bp;
    bp.c_n = cfg.bourgain_c_n;
    const PotentialOracle oracle = make_embedding_oracle(*embed_graph, cfg, depth);
    Embedding emb = bourgain_embed(*embed_graph, oracle, bp, cfg.seed + 0xe3bULL);

    const int jl_dim = cfg.jl_dim > 0 ? cfg.jl_dim
                                      : std::max(6, static_cast<int>(std::ceil(log2n)));
    Embedding reduced = jl_reduce(emb, g, jl_dim, cfg.seed + 0x71ULL);

    RoutingBundle bundle;
    bundle.points = reduced.points;
    bundle.point_scale = normalize_for_routing(bundle.points);
    bundle.embedding = std::move(reduced);

    auto [histories, used_seed] =
        build_basis_histories(bundle.points, cfg.routing, cfg.seed + 0x10adULL);
    const RoutingParams resolved =
        cfg.routing.resolved(n, static_cast<int>(bundle.points.empty() ? 0 : bundle.points[0].size()),
                             bundle.points);
    bundle.matrix = assemble_matrix(histories, resolved, n,
                                    static_cast<int>(bundle.points.empty() ? 0
                                                                           : bundle.points[0].size()),
                                    used_seed);
    bundle.routing_seed = used_seed;
    const int pairs = std::min(4 * n * n, 4000);
    CalibrationReport cal = calibrate(bundle.matrix, bundle.points, pairs, cfg.seed + 0xca1ULL);
    bundle.kappa = std::max(1.0, cal.kappa);
    return bundle;
}

SolveReport pipeline_transshipment(const Graph& g, const DemandVector& b, double eps,
                                   const PipelineConfig& cfg) {
    if (g.edge_count() <= 0 || b.l1_norm() == 0.0) {
        SolveReport rep;
        rep.epsilon = eps;
        rep.flow.values.assign(static_cast<size_t>(g.edge_count()), 0.0);
        rep.potential.values.assign(static_cast<size_t>(g.vertex_count()), 0.0);
        return rep;
    }
    RoutingBundle bundle = build_routing_bundle(g, cfg);
    SolverConfig scfg = cfg.solver;
    scfg.seed = cfg.seed;
    return solve_transshipment(g, b, eps, bundle.matrix, bundle.kappa, scfg);
}

RecTsSolver make_recursive_ts_solver(const PipelineConfig& cfg) {
    return [cfg](const Graph& g, const DemandVector& b, double eps) {
        if (g.edge_count() <= cfg.base_threshold && g.vertex_count() <= kOracleSizeCap) {
            OracleResult o = exact_transshipment(g, b);
            return *o.witness_flow; // optimal flows on positive weights are acyclic
        }
        SolveReport rep = pipeline_transshipment(g, b, std::min(1.0, std::max(eps, 1e-4)), cfg);
        return cancel_flow_cycles(g, rep.flow);
    };
}

SsspResult recursive_sssp(const Graph& g, VertexId s, double eps, const PipelineConfig& cfg,
                          int depth) {
    if (!g.connected()) throw std::invalid_argument("recursive_sssp: graph must be connected");
    if (s < 0 || s >= g.vertex_count())
        throw std::invalid_argument("recursive_sssp: source out of range");
    if (g.edge_count() <= cfg.base_threshold || depth >= cfg.max_depth)
        return dijkstra_sssp_result(g, s);

    RoutingBundle bundle = build_routing_bundle(g, cfg, depth);
    SolverConfig scfg = cfg.solver;
    scfg.seed = cfg.seed;
    const RoutingMatrix& R = bundle.matrix;
    const double kappa = bundle.kappa;
    PairSolver pair = [&](const DemandVector& b, double e) {
        return solve_transshipment(g, b, e, R, kappa, scfg);
    };
    RecTsSolver rec = make_recursive_ts_solver(cfg);
    return sssp_from_transshipment(g, s, eps, pair, rec, cfg.seed + 0x55ULL);
}

} // namespace tsh
