#include "tsh/commands.hpp"

#include "tsh/gen.hpp"
#include "tsh/io.hpp"
#include "tsh/oracle.hpp"
#include "tsh/tree_ops.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tsh {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json config_json(const RunConfig& rc) {
    return json{{"command", rc.command},
                {"graph", rc.graph_path},
                {"demands", rc.demand_path},
                {"output", rc.output_path},
                {"format", rc.format},
                {"epsilon", rc.epsilon},
                {"seed", rc.seed},
                {"source", rc.source},
                {"samples_s", rc.samples_s},
                {"grid_base_w", rc.grid_base_w},
                {"spanner_k", rc.spanner_k},
                {"kappa_override", rc.kappa_override},
                {"base_threshold", rc.base_threshold},
                {"jl_dim", rc.jl_dim},
                {"verify_cap", rc.verify_cap}};
}

json base_report(const RunConfig& rc) {
    return json{{"schema", 1}, {"config", config_json(rc)}};
}

struct ComponentView {
    std::vector<VertexId> vertices;       // global ids
    std::vector<int> to_local;            // shared across components
    Graph graph;
    std::vector<EdgeId> edge_to_global;
};

std::vector<ComponentView> split_components(const Graph& g) {
    auto [comp, count] = connected_components(g);
    std::vector<ComponentView> views(static_cast<size_t>(count));
    std::vector<int> to_local(static_cast<size_t>(g.vertex_count()), -1);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        auto& view = views[static_cast<size_t>(comp[static_cast<size_t>(v)])];
        to_local[static_cast<size_t>(v)] = static_cast<int>(view.vertices.size());
        view.vertices.push_back(v);
    }
    std::vector<std::vector<EdgeRec>> edges(static_cast<size_t>(count));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& r = g.edge(e);
        const int c = comp[static_cast<size_t>(r.u)];
        edges[static_cast<size_t>(c)].push_back({to_local[static_cast<size_t>(r.u)],
                                                 to_local[static_cast<size_t>(r.v)], r.w});
        views[static_cast<size_t>(c)].edge_to_global.push_back(e);
    }
    for (int c = 0; c < count; ++c) {
        views[static_cast<size_t>(c)].graph = Graph(
            static_cast<int>(views[static_cast<size_t>(c)].vertices.size()),
            std::move(edges[static_cast<size_t>(c)]));
        views[static_cast<size_t>(c)].to_local = to_local;
    }
    return views;
}

CommandResult cmd_transship(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    const auto t_start = Clock::now();

    Graph g = read_graph_file(rc.graph_path);
    DemandVector b = read_demands_file(rc.demand_path, g.vertex_count());
    if (!b.balanced(demand_balance_tol(b) + 1e-12)) {
        res.exit_code = kExitInfeasible;
        res.report["error"] = "demands not balanced";
        return res;
    }

    const PipelineConfig cfg = pipeline_config_from(rc);
    Flow flow_global;
    flow_global.values.assign(static_cast<size_t>(g.edge_count()), 0.0);
    Potential pot_global;
    pot_global.values.assign(static_cast<size_t>(g.vertex_count()), 0.0);
    double dual_total = 0.0;
    long iterations = 0;
    int oracle_calls = 0;
    bool any_normalized = false;

    // Per-component solving: cross-component demand is infeasible.
    for (const ComponentView& view : split_components(g)) {
        DemandVector bc;
        bc.values.resize(view.vertices.size());
        double sum = 0.0, l1 = 0.0;
        for (size_t i = 0; i < view.vertices.size(); ++i) {
            bc.values[i] = b.values[static_cast<size_t>(view.vertices[i])];
            sum += bc.values[i];
            l1 += std::abs(bc.values[i]);
        }
        if (l1 == 0.0) continue;
        if (std::abs(sum) > 1e-9 * l1) {
            res.exit_code = kExitInfeasible;
            res.report["error"] = "cross-component demand (component demand unbalanced)";
            return res;
        }

        // Aspect-ratio normalization requires integral demands; real-valued
        // demands skip it (report notes which path ran).
        Graph solved_graph = view.graph;
        AspectReport arep;
        const bool integral = bc.integral();
        if (integral) {
            auto [gg, rep2] = normalize_aspect_ratio(view.graph, bc);
            solved_graph = std::move(gg);
            arep = std::move(rep2);
            any_normalized = any_normalized || !arep.degenerate;
        } else {
            arep.degenerate = true;
            arep.kept_edge_ids.resize(static_cast<size_t>(view.graph.edge_count()));
            for (EdgeId e = 0; e < view.graph.edge_count(); ++e)
                arep.kept_edge_ids[static_cast<size_t>(e)] = e;
        }

        // The normalized graph may split into parts when demand-irrelevant
        // heavy edges were deleted; each part stays balanced.
        auto sub_views = split_components(solved_graph);
        const double n_local = static_cast<double>(solved_graph.vertex_count());
        const double dual_discount = arep.degenerate ? 1.0 : 1.0 + 1.0 / (n_local * n_local);
        for (const ComponentView& part : sub_views) {
            DemandVector bp;
            bp.values.resize(part.vertices.size());
            double pl1 = 0.0;
            for (size_t i = 0; i < part.vertices.size(); ++i) {
                bp.values[i] = bc.values[static_cast<size_t>(part.vertices[i])];
                pl1 += std::abs(bp.values[i]);
            }
            if (pl1 == 0.0) continue;
            if (!bp.balanced(1e-9 * pl1)) {
                res.exit_code = kExitInfeasible;
                res.report["error"] = "demand split across deleted heavy edges";
                return res;
            }
            // Solve slightly tighter than asked so the aspect-ratio discount
            // keeps the end-to-end contract at the caller's epsilon.
            SolveReport srep = pipeline_transshipment(part.graph, bp, rc.epsilon * 0.95, cfg);
            iterations += srep.iterations;
            oracle_calls += srep.oracle_calls;
            dual_total += srep.dual_value / dual_discount;
            for (EdgeId e = 0; e < part.graph.edge_count(); ++e) {
                const EdgeId mid = part.edge_to_global[static_cast<size_t>(e)]; // in solved_graph
                const EdgeId gid =
                    view.edge_to_global[static_cast<size_t>(arep.kept_edge_ids[static_cast<size_t>(mid)])];
                flow_global.values[static_cast<size_t>(gid)] = srep.flow.values[static_cast<size_t>(e)];
            }
            // Potential made feasible for the original weights.
            double lambda = 1.0;
            if (!arep.degenerate && arep.shift > 0.0)
                lambda = view.graph.min_weight() / (view.graph.min_weight() + arep.shift);
            for (size_t i = 0; i < part.vertices.size(); ++i) {
                const VertexId mid_v = part.vertices[i];
                const VertexId gv = view.vertices[static_cast<size_t>(mid_v)];
                pot_global.values[static_cast<size_t>(gv)] =
                    srep.potential.values[i] * lambda;
            }
        }
    }

    const double primal = flow_cost(g, flow_global);
    res.report["primal_cost"] = primal;
    res.report["dual_value"] = dual_total;
    res.report["gap"] = dual_total > 0.0 ? primal / dual_total - 1.0 : 0.0;
    res.report["iterations"] = iterations;
    res.report["oracle_calls"] = oracle_calls;
    res.report["normalized_aspect"] = any_normalized;
    {
        DemandVector dv = divergence(g, flow_global);
        double err = 0.0;
        for (size_t i = 0; i < dv.values.size(); ++i) err += std::abs(dv.values[i] - b.values[i]);
        res.report["conservation_l1_error"] = err;
    }
    if (!rc.output_path.empty()) {
        std::ostringstream fs, ps;
        write_flow(fs, g, flow_global);
        write_potential(ps, pot_global);
        spit_file(rc.output_path + ".flow", fs.str());
        spit_file(rc.output_path + ".pot", ps.str());
    }
    if (rc.with_timings) res.report["timings"] = json{{"total_ms", ms_since(t_start)}};
    return res;
}

CommandResult cmd_sssp(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    const auto t_start = Clock::now();

    Graph g = read_graph_file(rc.graph_path);
    if (!g.connected()) {
        res.exit_code = kExitInfeasible;
        res.report["error"] = "graph must be connected for sssp";
        return res;
    }
    const PipelineConfig cfg = pipeline_config_from(rc);
    SsspResult r = recursive_sssp(g, rc.source, rc.epsilon, cfg);

    double max_dist = 0.0;
    for (double d : r.dist)
        if (std::isfinite(d)) max_dist = std::max(max_dist, d);
    res.report["source"] = rc.source;
    res.report["loops"] = r.loops;
    res.report["solver_iterations"] = r.solver_iterations;
    res.report["max_distance"] = max_dist;
    if (!rc.output_path.empty()) {
        std::ostringstream ts, ps;
        write_sssp_tree(ts, r);
        write_potential(ps, r.potential.base);
        spit_file(rc.output_path + ".tree", ts.str());
        spit_file(rc.output_path + ".pot", ps.str());
    }
    if (rc.with_timings) res.report["timings"] = json{{"total_ms", ms_since(t_start)}};
    return res;
}

CommandResult cmd_embed(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    const auto t_start = Clock::now();

    Graph g = read_graph_file(rc.graph_path);
    if (!g.connected()) {
        res.exit_code = kExitInfeasible;
        res.report["error"] = "graph must be connected for embed";
        return res;
    }
    const PipelineConfig cfg = pipeline_config_from(rc);
    RoutingBundle bundle = build_routing_bundle(g, cfg);
    res.report["dimension"] = bundle.embedding.dimension;
    res.report["contraction"] = bundle.embedding.measured_contraction;
    res.report["expansion"] = bundle.embedding.measured_expansion;
    res.report["scale"] = bundle.embedding.scale;
    res.report["kappa"] = bundle.kappa;
    res.report["matrix_rows"] = bundle.matrix.rows();
    res.report["matrix_nonzeros"] = bundle.matrix.nonzeros();
    if (!rc.output_path.empty()) {
        std::ostringstream es;
        write_embedding(es, bundle.embedding);
        spit_file(rc.output_path, es.str());
        if (rc.dump_matrix) {
            std::ostringstream msx;
            bundle.matrix.dump(msx);
            spit_file(rc.output_path + ".matrix", msx.str());
        }
    }
    if (rc.with_timings) res.report["timings"] = json{{"total_ms", ms_since(t_start)}};
    return res;
}

CommandResult cmd_spanner(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    const auto t_start = Clock::now();

    Graph g = read_graph_file(rc.graph_path);
    const double log2n = std::log2(std::max(2.0, static_cast<double>(g.vertex_count())));
    const double k = rc.spanner_k > 0 ? rc.spanner_k : 4.0 * std::ceil(log2n);
    UltraSpanner sp = build_ultra_spanner(g, k, rc.seed);
    res.report["k"] = k;
    res.report["beta"] = sp.beta;
    res.report["rounds_used"] = sp.rounds_used;
    res.report["edges"] = sp.edges.size();
    res.report["edge_bound"] =
        g.vertex_count() - 1 + 2.0 * sp.beta * static_cast<double>(g.edge_count());

    if (g.vertex_count() <= rc.verify_cap) {
        std::vector<EdgeRec> sedges;
        for (EdgeId e : sp.edges) sedges.push_back(g.edge(e));
        Graph h(g.vertex_count(), std::move(sedges));
        double worst = 1.0;
        for (VertexId u = 0; u < g.vertex_count(); ++u) {
            const auto dh = dijkstra(h, {u}).dist;
            for (auto [v, e] : g.adjacency(u))
                if (v > u)
                    worst = std::max(worst, dh[static_cast<size_t>(v)] / g.edge(e).w);
        }
        res.report["measured_stretch"] = worst;
    }
    if (!rc.output_path.empty()) {
        std::vector<EdgeRec> sedges;
        for (EdgeId e : sp.edges) sedges.push_back(g.edge(e));
        Graph h(g.vertex_count(), std::move(sedges));
        std::ostringstream ss;
        write_graph(ss, h);
        spit_file(rc.output_path, ss.str());
    }
    if (rc.with_timings) res.report["timings"] = json{{"total_ms", ms_since(t_start)}};
    return res;
}

CommandResult cmd_route_demo(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    const auto t_start = Clock::now();

    // The reference instance: +1 at 5, -1 at 14 on [0, 2^levels].
    std::vector<std::pair<std::int64_t, std::int64_t>> demands{{5, 1}, {14, -1}};
    LineRoutingResult lr = line_routing_demo(demands, rc.route_demo_levels);
    res.report["iteration_costs"] = lr.iteration_costs;
    res.report["level_opt_costs"] = lr.level_opt_costs;
    res.report["total_cost"] = lr.total_cost;

    // Grid-routing trace of the same instance as 1-D points.
    PointSet pts{{5.0}, {14.0}};
    std::vector<double> b{1.0, -1.0};
    RoutingParams params;
    params.w = 2.0;
    params.s = rc.samples_s > 0 ? rc.samples_s : 1;
    params.num_levels = rc.route_demo_levels;
    RoutingTrace trace = run_routing(pts, b, params, rc.seed);
    res.report["grid_trace"] = json{{"iteration_costs", trace.iteration_costs},
                                    {"total_cost", trace.total_cost}};
    if (rc.with_timings) res.report["timings"] = json{{"total_ms", ms_since(t_start)}};
    return res;
}

CommandResult cmd_verify(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    Graph g = read_graph_file(rc.graph_path);
    json checks = json::array();
    bool ok = true;
    auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back(json{{"check", name}, {"pass", pass}, {"detail", detail}});
        ok = ok && pass;
    };

    if (!rc.flow_path.empty()) {
        std::ifstream ff(rc.flow_path);
        if (!ff) throw std::runtime_error("cannot open flow file");
        Flow f = read_flow(ff, g);
        if (!rc.demand_path.empty()) {
            DemandVector b = read_demands_file(rc.demand_path, g.vertex_count());
            DemandVector dv = divergence(g, f);
            double err = 0.0;
            for (size_t i = 0; i < dv.values.size(); ++i)
                err += std::abs(dv.values[i] - b.values[i]);
            const double tol = 1e-9 * std::max(1.0, b.l1_norm());
            record("flow-conservation", err <= tol,
                   "||div(f)-b||_1 = " + std::to_string(err));
            if (g.vertex_count() <= rc.verify_cap && g.connected()) {
                const double opt = exact_transshipment(g, b).opt_cost;
                const double cost = flow_cost(g, f);
                record("flow-cost-vs-oracle", cost >= opt - 1e-9 * std::max(1.0, opt),
                       "cost=" + std::to_string(cost) + " opt=" + std::to_string(opt));
            }
        } else {
            record("flow-readable", true, "no demands supplied; conservation not checked");
        }
    }
    if (!rc.potential_path.empty()) {
        std::ifstream pf(rc.potential_path);
        if (!pf) throw std::runtime_error("cannot open potential file");
        Potential phi = read_potential(pf, g.vertex_count());
        record("potential-feasible", validate_potential(g, phi),
               "edge scan |phi(u)-phi(v)| <= w");
    }
    if (!rc.tree_path.empty()) {
        std::ifstream tf(rc.tree_path);
        if (!tf) throw std::runtime_error("cannot open tree file");
        TreeFile t = read_sssp_tree(tf, g.vertex_count());
        const VertexId s = rc.source;
        bool structure = t.parent[static_cast<size_t>(s)] == -1;
        int edges = 0;
        // climb with step counter to expose cycles
        for (VertexId v = 0; v < g.vertex_count() && structure; ++v) {
            if (v == s) continue;
            if (t.parent[static_cast<size_t>(v)] < 0) {
                structure = false;
                break;
            }
            ++edges;
            VertexId cur = v;
            int steps = 0;
            while (cur != s && steps <= g.vertex_count()) {
                cur = t.parent[static_cast<size_t>(cur)];
                if (cur < 0) break;
                ++steps;
            }
            if (cur != s) structure = false;
        }
        record("tree-spanning-acyclic", structure && edges == g.vertex_count() - 1,
               "parents reach the source without cycles");
        if (structure) {
            // Each parent edge must exist; distances must telescope.
            bool weights_ok = true;
            for (VertexId v = 0; v < g.vertex_count(); ++v) {
                if (v == s) continue;
                const VertexId p = t.parent[static_cast<size_t>(v)];
                double w = -1.0;
                for (auto [nbr, e] : g.adjacency(v))
                    if (nbr == p) {
                        w = g.edge(e).w;
                        break;
                    }
                if (w < 0.0 ||
                    std::abs(t.dist[static_cast<size_t>(v)] -
                             (t.dist[static_cast<size_t>(p)] + w)) >
                        1e-7 * std::max(1.0, t.dist[static_cast<size_t>(v)])) {
                    weights_ok = false;
                    break;
                }
            }
            record("tree-distances-consistent", weights_ok, "d(v) = d(parent) + w(edge)");
            if (g.vertex_count() <= rc.verify_cap && g.connected()) {
                const auto sp = dijkstra(g, {s});
                bool lower_ok = true;
                double worst = 1.0;
                for (VertexId v = 0; v < g.vertex_count(); ++v) {
                    const double dexact = sp.dist[static_cast<size_t>(v)];
                    if (t.dist[static_cast<size_t>(v)] < dexact - 1e-7 * std::max(1.0, dexact))
                        lower_ok = false;
                    if (dexact > 0.0)
                        worst = std::max(worst, t.dist[static_cast<size_t>(v)] / dexact);
                }
                record("tree-distances-lower-bounded", lower_ok,
                       "max ratio vs dijkstra = " + std::to_string(worst));
            }
        }
    }
    res.report["checks"] = checks;
    res.report["verified"] = ok;
    if (!ok) res.exit_code = kExitVerifyFailure;
    return res;
}

CommandResult cmd_gen(const RunConfig& rc) {
    CommandResult res;
    res.report = base_report(rc);
    Graph g = gen_by_name(rc.generator, rc.gen_n, rc.gen_m, rc.gen_weight_spread, rc.seed);
    if (rc.output_path.empty()) throw std::runtime_error("gen: --output required");
    std::ostringstream gs;
    write_graph(gs, g);
    spit_file(rc.output_path, gs.str());
    if (rc.gen_demand_max > 0) {
        DemandVector b = gen_random_demands(g.vertex_count(), rc.gen_demand_max, rc.seed + 1);
        std::ostringstream ds;
        write_demands(ds, b);
        spit_file(rc.output_path + ".demands", ds.str());
    }
    res.report["n"] = g.vertex_count();
    res.report["m"] = g.edge_count();
    res.report["generator"] = rc.generator;
    return res;
}

} // namespace

PipelineConfig pipeline_config_from(const RunConfig& rc) {
    PipelineConfig cfg;
    cfg.base_threshold = rc.base_threshold;
    cfg.spanner_k = rc.spanner_k;
    cfg.jl_dim = rc.jl_dim;
    cfg.routing.s = rc.samples_s;
    cfg.routing.w = rc.grid_base_w;
    cfg.solver.kappa_override = rc.kappa_override;
    cfg.seed = rc.seed;
    return cfg;
}

CommandResult run_command(const RunConfig& rc) {
    try {
        if (rc.command == "transship") return cmd_transship(rc);
        if (rc.command == "sssp") return cmd_sssp(rc);
        if (rc.command == "embed") return cmd_embed(rc);
        if (rc.command == "spanner") return cmd_spanner(rc);
        if (rc.command == "route-demo") return cmd_route_demo(rc);
        if (rc.command == "verify") return cmd_verify(rc);
        if (rc.command == "gen") return cmd_gen(rc);
        CommandResult res;
        res.exit_code = kExitStageFailure;
        res.report = json{{"schema", 1}, {"error", "unknown command: " + rc.command}};
        return res;
    } catch (const std::invalid_argument& e) {
        CommandResult res;
        res.exit_code = kExitInfeasible;
        res.report = json{{"schema", 1}, {"error", e.what()}, {"config", config_json(rc)}};
        return res;
    } catch (const std::exception& e) {
        CommandResult res;
        res.exit_code = kExitStageFailure;
        res.report = json{{"schema", 1}, {"error", e.what()}, {"config", config_json(rc)}};
        return res;
    }
}

namespace {

void flatten(const json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out += prefix;
        out += '\t';
        out += j.is_string() ? j.get<std::string>() : j.dump();
        out += '\n';
    }
}

} // namespace

std::string report_to_tsv(const nlohmann::json& report) {
    std::string out;
    flatten(report, "", out);
    return out;
}

} // namespace tsh
