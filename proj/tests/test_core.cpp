#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"
#include "tsh/gen.hpp"
#include "tsh/oracle.hpp"
#include "tsh/tree_ops.hpp"

#include <cmath>

using namespace tsh;

TEST_CASE("graph construction validates invariants") {
    CHECK_THROWS(Graph(2, {{0, 0, 1.0}}));   // self-loop
    CHECK_THROWS(Graph(2, {{0, 2, 1.0}}));   // out of range
    CHECK_THROWS(Graph(2, {{0, 1, 0.0}}));   // nonpositive weight
    CHECK_THROWS(Graph(2, {{0, 1, -3.0}}));
    Graph g(3, {{0, 1, 1.0}, {1, 2, 2.0}});
    CHECK(g.connected());
    CHECK(g.adjacency(1).size() == 2);
    Graph h(3, {{0, 1, 1.0}});
    CHECK_FALSE(h.connected());
}

TEST_CASE("divergence: zero flow, two-edge path, random vs brute force") {
    Graph path = gen_path(3);
    Flow zero{std::vector<double>(2, 0.0)};
    for (double x : divergence(path, zero).values) CHECK(x == 0.0);

    // f = +1 on (a,b) and +1 on (b,c): demands (-1, 0, +1) under
    // positive-divergence-is-net-inflow.
    Flow f{{1.0, 1.0}};
    DemandVector b = divergence(path, f);
    CHECK(b.values[0] == -1.0);
    CHECK(b.values[1] == 0.0);
    CHECK(b.values[2] == 1.0);

    Graph g = gen_random_connected(10, 22, 5.0, 7);
    Rng rng = derive_rng(3, 1);
    Flow rf;
    for (int e = 0; e < g.edge_count(); ++e) rf.values.push_back(rng.uniform01() * 4.0 - 2.0);
    DemandVector dv = divergence(g, rf);
    // Brute-force per-edge accumulation oracle.
    std::vector<double> expect(10, 0.0);
    for (int e = 0; e < g.edge_count(); ++e) {
        expect[static_cast<size_t>(g.edge(e).v)] += rf.values[static_cast<size_t>(e)];
        expect[static_cast<size_t>(g.edge(e).u)] -= rf.values[static_cast<size_t>(e)];
    }
    for (int v = 0; v < 10; ++v) CHECK(dv.values[static_cast<size_t>(v)] == doctest::Approx(expect[static_cast<size_t>(v)]));
    CHECK(std::abs(dv.sum()) < 1e-12);
}

TEST_CASE("divergence is linear") {
    Graph g = gen_random_connected(12, 30, 4.0, 11);
    Rng rng = derive_rng(5, 2);
    Flow f1, f2, fsum;
    for (int e = 0; e < g.edge_count(); ++e) {
        f1.values.push_back(rng.uniform01());
        f2.values.push_back(rng.uniform01() * 3.0 - 1.0);
        fsum.values.push_back(f1.values.back() + f2.values.back());
    }
    const DemandVector d1 = divergence(g, f1), d2 = divergence(g, f2), ds = divergence(g, fsum);
    for (size_t i = 0; i < ds.values.size(); ++i)
        CHECK(ds.values[i] == doctest::Approx(d1.values[i] + d2.values[i]).epsilon(1e-9));
}

TEST_CASE("flow_cost basics and oracle") {
    Graph g(2, {{0, 1, 3.0}});
    CHECK(flow_cost(g, Flow{{0.0}}) == 0.0);
    CHECK(flow_cost(g, Flow{{1.0}}) == 3.0);
    CHECK(flow_cost(g, Flow{{-2.0}}) == 6.0);
}

TEST_CASE("dijkstra: trivial, path, random graph vs Bellman-Ford") {
    Graph one(1, {});
    auto sp1 = dijkstra(one, {0});
    CHECK(sp1.dist[0] == 0.0);
    CHECK_THROWS(dijkstra(one, {}));

    Graph path = gen_path(5);
    auto sp = dijkstra(path, {0});
    for (int v = 0; v < 5; ++v) CHECK(sp.dist[static_cast<size_t>(v)] == doctest::Approx(v));

    for (std::uint64_t seed : {1, 2, 3}) {
        Graph g = gen_random_connected(24, 60, 9.0, seed);
        auto got = dijkstra(g, {0});
        auto want = testutil::bellman_ford(g, 0);
        for (int v = 0; v < 24; ++v)
            CHECK(got.dist[static_cast<size_t>(v)] ==
                  doctest::Approx(want[static_cast<size_t>(v)]).epsilon(1e-12));
    }
}

TEST_CASE("multi-source dijkstra equals min over sources") {
    Graph g = gen_random_connected(20, 40, 6.0, 17);
    std::vector<VertexId> S{2, 9, 15};
    auto multi = dijkstra(g, S);
    for (int v = 0; v < 20; ++v) {
        double best = std::numeric_limits<double>::infinity();
        for (VertexId s : S) best = std::min(best, dijkstra(g, {s}).dist[static_cast<size_t>(v)]);
        CHECK(multi.dist[static_cast<size_t>(v)] == doctest::Approx(best));
    }
}

TEST_CASE("minimum spanning tree: tree input, triangle, brute-force weight") {
    Graph t = gen_path(6);
    CHECK(minimum_spanning_tree(t).size() == 5);

    Graph tri(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}});
    auto mst = minimum_spanning_tree(tri);
    double w = 0.0;
    for (EdgeId e : mst) w += tri.edge(e).w;
    CHECK(w == 3.0);

    for (std::uint64_t seed : {4, 5, 6}) {
        Graph g = gen_random_connected(8, 14, 7.0, seed);
        auto got = minimum_spanning_tree(g);
        double total = 0.0;
        for (EdgeId e : got) total += g.edge(e).w;
        CHECK(total == doctest::Approx(testutil::min_spanning_weight_bruteforce(g)));
    }
    Graph disc(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    CHECK_THROWS(minimum_spanning_tree(disc));
}

TEST_CASE("route_on_tree: zero demands, path peeling, divergence check") {
    Graph path = gen_path(3);
    std::vector<EdgeId> tree{0, 1};
    DemandVector zero{{0.0, 0.0, 0.0}};
    for (double x : route_on_tree(path, tree, zero).values) CHECK(x == 0.0);

    // s-a-b with b = (-2, +1, +1): flow 2 on (s,a), then 1 on (a,b).
    DemandVector d{{-2.0, 1.0, 1.0}};
    Flow f = route_on_tree(path, tree, d);
    CHECK(f.values[0] == doctest::Approx(2.0));
    CHECK(f.values[1] == doctest::Approx(1.0));

    for (std::uint64_t seed : {21, 22, 23}) {
        Graph g = gen_random_connected(16, 15, 5.0, seed); // a random tree
        DemandVector b = gen_random_demands(16, 4, seed);
        Flow rf = route_on_tree(g, minimum_spanning_tree(g), b);
        DemandVector dv = divergence(g, rf);
        for (size_t i = 0; i < dv.values.size(); ++i)
            CHECK(dv.values[i] == doctest::Approx(b.values[i]).epsilon(1e-9));
    }
    DemandVector bad{{1.0, 0.0, 0.0}};
    CHECK_THROWS(route_on_tree(path, tree, bad));
}

TEST_CASE("tree_sssp_potential: all-source, star, random tree vs dijkstra") {
    Graph star(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
    std::vector<VertexId> all{0, 1, 2, 3, 4};
    auto p_all = tree_sssp_potential(star, all);
    for (double x : p_all.base.values) CHECK(x == 0.0);

    auto p_center = tree_sssp_potential(star, {0});
    CHECK(p_center.base.values[0] == 0.0);
    for (int v = 1; v < 5; ++v) CHECK(p_center.base.values[static_cast<size_t>(v)] == 1.0);

    Graph rt = gen_random_connected(20, 19, 6.0, 31);
    std::vector<VertexId> S{3, 12};
    auto p = tree_sssp_potential(rt, S);
    auto want = dijkstra(rt, S).dist;
    for (int v = 0; v < 20; ++v)
        CHECK(p.base.values[static_cast<size_t>(v)] == doctest::Approx(want[static_cast<size_t>(v)]));
    CHECK(validate_sssp_potential(rt, p, want));

    Graph cyc = gen_cycle(4);
    CHECK_THROWS(tree_sssp_potential(cyc, {0}));
}

TEST_CASE("validators: exact distances valid, zero potential, feasibility scan") {
    Graph g = gen_random_connected(18, 40, 5.0, 41);
    auto d = dijkstra(g, {0}).dist;
    SsspPotential p;
    p.base.values = d;
    p.source_set = {0};
    p.alpha = 1.0;
    CHECK(validate_sssp_potential(g, p, d));

    SsspPotential zero;
    zero.base.values.assign(18, 0.0);
    zero.source_set = {0};
    zero.alpha = 1.0;
    CHECK(validate_potential(g, zero.base));
    CHECK_FALSE(validate_sssp_potential(g, zero, d)); // fails property (1)

    Potential bad;
    bad.values.assign(18, 0.0);
    bad.values[g.edge(0).v] = g.edge(0).w * 2.0;
    bad.values[g.edge(0).u] = 0.0;
    CHECK_FALSE(validate_potential(g, bad));
}

TEST_CASE("weak duality on random instances") {
    for (std::uint64_t seed : {51, 52, 53, 54}) {
        Graph g = gen_random_connected(14, 30, 6.0, seed);
        DemandVector b = gen_random_demands(14, 3, seed);
        OracleResult o = exact_transshipment(g, b);
        // any feasible phi and any flow with divergence b: b.phi <= cost(f)
        CHECK(validate_potential(g, *o.witness_potential));
        const double dual = testutil::dot(o.witness_potential->values, b.values);
        Flow mstf = route_on_tree(g, minimum_spanning_tree(g), b);
        CHECK(dual <= flow_cost(g, mstf) + 1e-7 * std::max(1.0, o.opt_cost));
    }
}

TEST_CASE("normalize_aspect_ratio: single edge, heavy irrelevant edge, triangle") {
    Graph one(2, {{0, 1, 5.0}});
    DemandVector b1{{-1.0, 1.0}};
    auto [g1, rep1] = normalize_aspect_ratio(one, b1);
    CHECK(g1.edge_count() == 1);
    CHECK(g1.edge(0).w == doctest::Approx(5.0 + rep1.shift));
    CHECK(rep1.z == doctest::Approx(5.0));

    // Heavy edge irrelevant to b gets deleted when Z < its weight.
    Graph g2in(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1e9}, {0, 2, 2.0}});
    DemandVector b2{{-1.0, 0.0, 1.0, 0.0}};
    const double opt_before = exact_transshipment(g2in, b2).opt_cost;
    auto [g2, rep2] = normalize_aspect_ratio(g2in, b2);
    CHECK(rep2.deleted_edges == 1);
    // opt preserved within 1 + 1/n^2 on the kept component.
    std::vector<EdgeRec> kept;
    for (int e = 0; e < g2.edge_count(); ++e) kept.push_back(g2.edge(e));
    DemandVector b2sub{{-1.0, 0.0, 1.0, 0.0}};
    // vertex 3 is isolated now; solve on the full vertex set fails
    // connectivity, so check on the component containing the demand.
    Graph g2c(3, {{0, 1, g2.edge(0).w}, {1, 2, g2.edge(1).w}, {0, 2, g2.edge(2).w}});
    DemandVector b2c{{-1.0, 0.0, 1.0}};
    const double opt_after = exact_transshipment(g2c, b2c).opt_cost;
    CHECK(opt_after >= opt_before - 1e-9);
    CHECK(opt_after <= opt_before * (1.0 + 1.0 / 16.0) + 1e-9);

    Graph tri(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}});
    DemandVector b3{{-1.0, 0.0, 1.0}};
    const double before = exact_transshipment(tri, b3).opt_cost;
    auto [g3, rep3] = normalize_aspect_ratio(tri, b3);
    const double after = exact_transshipment(g3, b3).opt_cost;
    CHECK(after >= before - 1e-12);
    CHECK(after <= before * (1.0 + 1.0 / 9.0));
    CHECK(rep3.deleted_edges == 1); // the weight-3 edge exceeds Z = 2

    DemandVector zero{{0.0, 0.0, 0.0}};
    auto [g4, rep4] = normalize_aspect_ratio(tri, zero);
    CHECK(rep4.degenerate);
    CHECK(g4.edge_count() == 3);
}

TEST_CASE("normalize_aspect_ratio bounds the weight spread") {
    for (std::uint64_t seed : {61, 62}) {
        Graph g = gen_random_connected(12, 26, 1e6, seed);
        DemandVector b = gen_random_demands(12, 11, seed);
        auto [gg, rep] = normalize_aspect_ratio(g, b);
        if (rep.degenerate) continue;
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        for (int e = 0; e < gg.edge_count(); ++e) {
            mx = std::max(mx, gg.edge(e).w);
            mn = std::min(mn, gg.edge(e).w);
        }
        const double n4m = std::pow(12.0, 4) * 11.0 * 2.0;
        CHECK(mx / mn <= n4m);
    }
}

TEST_CASE("cancel_flow_cycles removes cycles and preserves divergence") {
    Graph tri(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    // Pure circulation plus a path flow.
    Flow f{{2.0, 2.0, -1.0}}; // 0->1->2 plus 0->2 backwards(-1 means 2->0): cycle of 1
    Flow g2 = cancel_flow_cycles(tri, f);
    DemandVector d1 = divergence(tri, f), d2 = divergence(tri, g2);
    for (size_t i = 0; i < d1.values.size(); ++i)
        CHECK(d1.values[i] == doctest::Approx(d2.values[i]).epsilon(1e-12));
    CHECK(flow_cost(tri, g2) <= flow_cost(tri, f));
    // support is acyclic: at most 2 nonzero edges on a triangle
    int nz = 0;
    for (double x : g2.values) nz += (x != 0.0);
    CHECK(nz <= 2);
}
