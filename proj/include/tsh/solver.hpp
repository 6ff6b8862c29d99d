#pragma once

#include "tsh/graph.hpp"
#include "tsh/routing.hpp"

#include <cstdint>

namespace tsh {

struct MwuConfig {
    double c_mwu = 3.0;            // round-cap constant
    double learning_rate = 0.0;    // 0 => eps / (2 * kappa)
    long hard_round_cap = 400000;  // safety net below the formula cap
    int certificate_interval = 1;  // test the averaged dual every rounds
};

// Output of one feasibility run: either a flow certified by direct checks
// (cost <= t, ||R(Af - b)||_1 < eps*t, acyclic support) or a strictly
// feasible potential scaled so b . phi = t, certifying opt >= t.
struct MwuOutcome {
    bool is_flow = false;
    Flow flow;
    double flow_cost = 0.0;
    double residual_estimate = 0.0; // ||R(Af - b)||_1
    Potential potential;
    double dual_value = 0.0; // b . phi (= t on the potential branch)
    long rounds = 0;
};

MwuOutcome mwu_round(const RoutingMatrix& R, const Graph& g, const DemandVector& b, double t,
                     double eps, double kappa, const MwuConfig& cfg = {});

struct SolverConfig {
    double kappa_override = 0.0;  // 0 => use the calibration value supplied
    double mwu_constant = 3.0;
    int max_repair_rounds = -1;   // -1 => ceil(log2 n)
    std::uint64_t seed = 0;
    double eps_floor = 0.0;       // requested eps is clamped below at this
    double exact_fallback_eps_scale = 1.0; // eps < scale/n^2 => exact oracle
    long hard_round_cap = 400000;
};

struct SolveReport {
    Flow flow;
    Potential potential;
    double epsilon = 0.0;
    long iterations = 0;   // total MWU rounds
    int oracle_calls = 0;  // mwu_round invocations
    int repair_rounds = 0;
    double primal_cost = 0.0;
    double dual_value = 0.0;
    bool used_exact_fallback = false;
};

// Sherman-style boosting driver: geometric descent on t while flows come
// back, binary search to bracket opt within eps*t, potential extraction just
// below the bracket and flow extraction just above, then residual repair
// rounds finished exactly over the minimum spanning tree.
SolveReport solve_transshipment(const Graph& g, const DemandVector& b, double eps,
                                const RoutingMatrix& R, double kappa,
                                const SolverConfig& cfg = {});

// Augments f so its divergence equals b exactly: `rounds` approximate
// residual solves against R, then an exact tree routing of what remains.
Flow repair_residual(const Graph& g, Flow f, const DemandVector& b, int rounds,
                     const RoutingMatrix& R, double kappa, double eps,
                     const SolverConfig& cfg = {}, long* iterations = nullptr,
                     int* oracle_calls = nullptr);

} // namespace tsh
