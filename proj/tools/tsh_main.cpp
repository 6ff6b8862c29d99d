#include "tsh/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Approximate minimum transshipment and shortest paths via l1 routing"};
    app.require_subcommand(1);

    tsh::RunConfig rc;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--epsilon", rc.epsilon, "approximation parameter in (0,1]");
        sub->add_option("--seed", rc.seed, "64-bit seed");
        sub->add_option("--samples-s", rc.samples_s, "grids per routing iteration");
        sub->add_option("--grid-base-w", rc.grid_base_w, "grid width base");
        sub->add_option("--spanner-k", rc.spanner_k, "spanner stretch parameter");
        sub->add_option("--kappa", rc.kappa_override, "override calibrated kappa");
        sub->add_option("--base-threshold", rc.base_threshold,
                        "edge count below which exact algorithms run");
        sub->add_option("--jl-dim", rc.jl_dim, "dimension after random projection");
        sub->add_option("--format", rc.format, "report format: json or tsv");
        sub->add_option("--verify-cap", rc.verify_cap, "max n for oracle cross-checks");
        sub->add_flag("--no-timings{false}", rc.with_timings, "omit timing fields");
        sub->add_option("--output,-o", rc.output_path, "output path prefix");
    };

    auto* ts = app.add_subcommand("transship", "(1+eps)-approximate minimum transshipment");
    ts->add_option("--graph", rc.graph_path, "edge-list file")->required();
    ts->add_option("--demands", rc.demand_path, "demand file")->required();
    add_common(ts);

    auto* ss = app.add_subcommand("sssp", "(1+eps)-approximate shortest path tree");
    ss->add_option("--graph", rc.graph_path, "edge-list file")->required();
    ss->add_option("--source", rc.source, "source vertex");
    add_common(ss);

    auto* em = app.add_subcommand("embed", "l1 embedding plus routing matrix");
    em->add_option("--graph", rc.graph_path, "edge-list file")->required();
    em->add_flag("--dump-matrix", rc.dump_matrix, "also dump the routing matrix");
    add_common(em);

    auto* sp = app.add_subcommand("spanner", "ultra-spanner construction");
    sp->add_option("--graph", rc.graph_path, "edge-list file")->required();
    add_common(sp);

    auto* rd = app.add_subcommand("route-demo", "1-D routing reference instance");
    rd->add_option("--levels", rc.route_demo_levels, "iterations (default 5)");
    add_common(rd);

    auto* vf = app.add_subcommand("verify", "re-check emitted artifacts against the graph");
    vf->add_option("--graph", rc.graph_path, "edge-list file")->required();
    vf->add_option("--demands", rc.demand_path, "demand file");
    vf->add_option("--flow", rc.flow_path, "flow file to verify");
    vf->add_option("--potential", rc.potential_path, "potential file to verify");
    vf->add_option("--tree", rc.tree_path, "tree file to verify");
    vf->add_option("--source", rc.source, "tree source vertex");
    add_common(vf);

    auto* gn = app.add_subcommand("gen", "write a generated instance");
    gn->add_option("--kind", rc.generator, "path|cycle|grid|complete|random-connected");
    gn->add_option("--n", rc.gen_n, "vertex count");
    gn->add_option("--m", rc.gen_m, "edge count (random-connected)");
    gn->add_option("--weight-spread", rc.gen_weight_spread, "max weight (min is 1)");
    gn->add_option("--demand-max", rc.gen_demand_max, "also write demands with |b_v| <= this");
    add_common(gn);

    CLI11_PARSE(app, argc, argv);
    rc.command = app.get_subcommands().front()->get_name();

    tsh::CommandResult res = tsh::run_command(rc);
    if (rc.format == "tsv")
        std::cout << tsh::report_to_tsv(res.report);
    else
        std::cout << res.report.dump(2) << "\n";
    return res.exit_code;
}
