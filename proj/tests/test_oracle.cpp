#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"
#include "tsh/gen.hpp"
#include "tsh/oracle.hpp"
#include "tsh/tree_ops.hpp"

#include <cmath>

using namespace tsh;

TEST_CASE("exact_transshipment: trivial and small closed forms") {
    Graph one(2, {{0, 1, 5.0}});
    DemandVector zero{{0.0, 0.0}};
    CHECK(exact_transshipment(one, zero).opt_cost == 0.0);
    DemandVector unit{{-1.0, 1.0}};
    CHECK(exact_transshipment(one, unit).opt_cost == doctest::Approx(5.0));

    // Triangle w = (1,1,3), b = chi_c - chi_a: optimum 2 via the unit edges
    // (the only simple alternatives are cost 2 and cost 3).
    Graph tri(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}});
    DemandVector b{{-1.0, 0.0, 1.0}};
    CHECK(exact_transshipment(tri, b).opt_cost == doctest::Approx(2.0));

    DemandVector bad{{1.0, 1.0, 0.0}};
    CHECK_THROWS(exact_transshipment(tri, bad));
}

TEST_CASE("exact_transshipment: witnesses satisfy strong duality") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Graph g = gen_random_connected(16, 34, 6.0, seed);
        DemandVector b = gen_random_demands(16, 5, seed + 100);
        OracleResult o = exact_transshipment(g, b);
        REQUIRE(o.witness_flow.has_value());
        REQUIRE(o.witness_potential.has_value());
        // Primal feasibility: divergence matches exactly.
        DemandVector dv = divergence(g, *o.witness_flow);
        for (size_t i = 0; i < dv.values.size(); ++i)
            CHECK(dv.values[i] == doctest::Approx(b.values[i]).epsilon(1e-9));
        // Dual feasibility and primal = dual at the optimum.
        CHECK(validate_potential(g, *o.witness_potential));
        const double dual = testutil::dot(o.witness_potential->values, b.values);
        CHECK(dual == doctest::Approx(o.opt_cost).epsilon(1e-7));
        CHECK(o.opt_cost == doctest::Approx(flow_cost(g, *o.witness_flow)).epsilon(1e-9));
    }
}

TEST_CASE("exact_transshipment matches tree routing on trees") {
    for (std::uint64_t seed : {5, 9}) {
        Graph t = gen_random_connected(12, 11, 4.0, seed);
        DemandVector b = gen_random_demands(12, 3, seed);
        const double opt = exact_transshipment(t, b).opt_cost;
        const double tree_cost = flow_cost(t, route_on_tree(t, minimum_spanning_tree(t), b));
        CHECK(opt == doctest::Approx(tree_cost).epsilon(1e-9));
    }
}

TEST_CASE("exact_apsp: path pattern, symmetry, Floyd-Warshall") {
    Graph path = gen_path(6);
    auto d = exact_apsp(path);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(d[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                  doctest::Approx(std::abs(i - j)));

    Graph g = gen_random_connected(20, 50, 7.0, 3);
    auto got = exact_apsp(g);
    auto want = testutil::floyd_warshall(g);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            CHECK(got[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                  doctest::Approx(want[static_cast<size_t>(i)][static_cast<size_t>(j)])
                      .epsilon(1e-10));
            CHECK(got[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                  doctest::Approx(got[static_cast<size_t>(j)][static_cast<size_t>(i)]));
        }
}

TEST_CASE("line routing reproduces the 1-D reference instance bit-exactly") {
    // +1 at 5, -1 at 14, levels 1..5: iteration costs 1, 3, 5, 3, 9 and the
    // optimum of every intermediate demand stays 18 under doubled cost.
    LineRoutingResult r = line_routing_demo({{5, 1}, {14, -1}}, 5);
    REQUIRE(r.iteration_costs.size() == 5);
    CHECK(r.iteration_costs[0] == 1.0);
    CHECK(r.iteration_costs[1] == 3.0);
    CHECK(r.iteration_costs[2] == 5.0);
    CHECK(r.iteration_costs[3] == 3.0);
    CHECK(r.iteration_costs[4] == 9.0);
    CHECK(r.final_merge_cost == 9.0); // 9/32 residual moved across 32
    CHECK(r.total_cost == 30.0);
    REQUIRE(r.level_opt_costs.size() == 6);
    for (size_t t = 0; t + 1 < r.level_opt_costs.size(); ++t)
        CHECK(r.level_opt_costs[t] == 18.0);
}

TEST_CASE("line routing: cancellation at a shared point") {
    LineRoutingResult r = line_routing_demo({{6, 1}, {6, -1}}, 4);
    for (double c : r.iteration_costs) CHECK(c == 0.0);
    CHECK(r.total_cost == 0.0);
}

TEST_CASE("line routing total within the competitive envelope") {
    Rng rng = derive_rng(77, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const int levels = 6;
        std::vector<std::pair<std::int64_t, std::int64_t>> demands;
        long total = 0;
        for (int i = 0; i < 6; ++i) {
            const auto x = static_cast<std::int64_t>(rng.next_below(1 << levels));
            const auto v = static_cast<std::int64_t>(rng.next_below(9)) - 4;
            demands.push_back({x, v});
            total += v;
        }
        demands.push_back({0, -total});
        LineRoutingResult r = line_routing_demo(demands, levels);
        const double opt2 = r.level_opt_costs[0];
        if (opt2 == 0.0) continue;
        // Completed routing moves at least opt worth of mass and at most
        // (levels + 1) times it (per-level cost <= per-level optimum).
        CHECK(r.total_cost >= opt2 / 2.0 - 1e-9);
        CHECK(r.total_cost <= (levels + 1) * opt2 / 2.0 + 1e-9);
    }
}

TEST_CASE("dyadic arithmetic stays exact") {
    Dyadic a = Dyadic::from_int(1);
    for (int i = 0; i < 30; ++i) a = a.half();
    Dyadic b = a;
    for (int i = 0; i < 30; ++i) b = b + b;
    CHECK(b == Dyadic::from_int(1));
    CHECK((Dyadic::from_int(3).half() + Dyadic::from_int(5).half()) == Dyadic::from_int(4));
}
