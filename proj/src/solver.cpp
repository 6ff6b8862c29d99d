#include "tsh/solver.hpp"

#include "tsh/oracle.hpp"
#include "tsh/tree_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsh {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l1(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += std::abs(x);
    return s;
}

} // namespace

MwuOutcome mwu_round(const RoutingMatrix& R, const Graph& g, const DemandVector& b, double t,
                     double eps, double kappa, const MwuConfig& cfg) {
    if (!(kappa > 0.0)) throw std::invalid_argument("mwu_round: kappa must be positive");
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("mwu_round: eps must be in (0,1]");
    if (!(t > 0.0)) throw std::invalid_argument("mwu_round: t must be positive");

    const int m = g.edge_count();
    const int n = g.vertex_count();
    const double delta = cfg.learning_rate > 0.0 ? cfg.learning_rate : eps / (2.0 * kappa);
    const double omega = 3.0 * kappa;
    const double formula_cap =
        cfg.c_mwu * omega * omega * std::log(2.0 * std::max(2, m)) / (delta * delta);
    const long round_cap =
        std::min<long>(cfg.hard_round_cap,
                       static_cast<long>(std::min(formula_cap, 4.0e18)) + 1);

    const std::vector<double> Rb = R.matvec(b.values);

    // p over the 2m signed edge constraints; uniform start.
    std::vector<double> p_plus(static_cast<size_t>(m), 1.0 / (2.0 * m));
    std::vector<double> p_minus(static_cast<size_t>(m), 1.0 / (2.0 * m));

    // Running sums for the averaged dual certificate.
    std::vector<double> zsum(static_cast<size_t>(n), 0.0);
    double qsum = 0.0;

    Flow f;
    f.values.assign(static_cast<size_t>(m), 0.0);
    std::vector<double> resid(static_cast<size_t>(n));

    MwuOutcome out;
    for (long round = 1; round <= round_cap; ++round) {
        out.rounds = round;
        // Flow induced by the current weights: f_e = -t (p+ - p-) / w_e.
        for (EdgeId e = 0; e < m; ++e)
            f.values[static_cast<size_t>(e)] =
                -t * (p_plus[static_cast<size_t>(e)] - p_minus[static_cast<size_t>(e)]) /
                g.edge(e).w;
        // Oracle test vector (1/t) R (b - A f).
        const DemandVector div = divergence(g, f);
        for (int v = 0; v < n; ++v)
            resid[static_cast<size_t>(v)] =
                b.values[static_cast<size_t>(v)] - div.values[static_cast<size_t>(v)];
        const std::vector<double> Rres = R.matvec(resid);
        const double viol = l1(Rres) / t;
        if (viol < eps) {
            // Infeasible for this p: the induced flow is the certificate.
            out.is_flow = true;
            out.flow = f;
            out.flow_cost = flow_cost(g, f);
            out.residual_estimate = viol * t;
            out.dual_value = 0.0;
            return out;
        }

        // y = -sign(v_p); z = R^T y drives both the weight update and the
        // averaged dual.
        std::vector<double> y(Rres.size());
        for (size_t i = 0; i < Rres.size(); ++i)
            y[i] = Rres[i] > 0.0 ? -1.0 : (Rres[i] < 0.0 ? 1.0 : 0.0);
        const std::vector<double> z = R.matvec_transposed(y);
        const double q = dot(y, Rb) / t;

        double norm = 0.0;
        for (EdgeId e = 0; e < m; ++e) {
            const EdgeRec& r = g.edge(e);
            const double drop = (z[static_cast<size_t>(r.v)] - z[static_cast<size_t>(r.u)]) / r.w;
            const double gp = std::exp(delta * (drop + q));
            const double gm = std::exp(delta * (-drop + q));
            p_plus[static_cast<size_t>(e)] *= gp;
            p_minus[static_cast<size_t>(e)] *= gm;
            norm += p_plus[static_cast<size_t>(e)] + p_minus[static_cast<size_t>(e)];
        }
        const double inv_norm = 1.0 / norm;
        for (EdgeId e = 0; e < m; ++e) {
            p_plus[static_cast<size_t>(e)] *= inv_norm;
            p_minus[static_cast<size_t>(e)] *= inv_norm;
        }

        for (size_t i = 0; i < zsum.size(); ++i) zsum[i] += z[i];
        qsum += q;

        if (round % cfg.certificate_interval == 0) {
            // Averaged dual: phi0 = -zsum (scaling cancels in the test). It
            // certifies opt >= t as soon as max_e |drop|/w < (b . phi0) / t.
            const double value = -qsum; // = (b . phi0) / t
            if (value > 0.0) {
                double max_drop = 0.0;
                for (EdgeId e = 0; e < m; ++e) {
                    const EdgeRec& r = g.edge(e);
                    max_drop = std::max(max_drop,
                                        std::abs(zsum[static_cast<size_t>(r.v)] -
                                                 zsum[static_cast<size_t>(r.u)]) /
                                            r.w);
                }
                if (max_drop < value * (1.0 - 1e-9)) {
                    out.is_flow = false;
                    out.potential.values.resize(static_cast<size_t>(n));
                    const double scale = 1.0 / value; // makes b . phi = t exactly
                    for (int v = 0; v < n; ++v)
                        out.potential.values[static_cast<size_t>(v)] =
                            -zsum[static_cast<size_t>(v)] * scale;
                    out.dual_value = t;
                    return out;
                }
            }
        }
    }
    throw std::runtime_error("mwu_round: no certificate within round cap (t=" +
                             std::to_string(t) + ", eps=" + std::to_string(eps) +
                             ", kappa=" + std::to_string(kappa) + ")");
}

namespace {

struct SearchState {
    bool have_flow = false;
    Flow best_flow;
    double best_flow_t = 0.0;
    double best_flow_cost = 0.0;
    bool have_potential = false;
    Potential best_potential;
    double best_dual = 0.0;
    long rounds = 0;
    int calls = 0;
};

MwuConfig make_mwu_config(const SolverConfig& cfg) {
    MwuConfig mc;
    mc.c_mwu = cfg.mwu_constant;
    mc.hard_round_cap = cfg.hard_round_cap;
    return mc;
}

void absorb(SearchState& st, const MwuOutcome& o, double t) {
    st.rounds += o.rounds;
    ++st.calls;
    if (o.is_flow) {
        if (!st.have_flow || t < st.best_flow_t) {
            st.have_flow = true;
            st.best_flow = o.flow;
            st.best_flow_t = t;
            st.best_flow_cost = o.flow_cost;
        }
    } else if (!st.have_potential || o.dual_value > st.best_dual) {
        st.have_potential = true;
        st.best_potential = o.potential;
        st.best_dual = o.dual_value;
    }
}

// Geometric descent followed by binary search; returns the bracket
// [t_lo certified by a potential, t_hi certified by a flow].
void bracket_opt(const Graph& g, const DemandVector& b, double eps, const RoutingMatrix& R,
                 double kappa, const MwuConfig& mc, double t_start, bool binary_refine,
                 SearchState& st) {
    double t = t_start;
    const double floor_t = t_start * 1e-18;
    double t_lo = 0.0, t_hi = t_start;
    for (;;) {
        MwuOutcome o = mwu_round(R, g, b, t, eps, kappa, mc);
        absorb(st, o, t);
        if (o.is_flow) {
            t_hi = t;
            t = (1.0 + eps) * t / 2.0;
            if (t < floor_t)
                throw std::runtime_error("solve_transshipment: descent hit zero (degenerate instance)");
            continue;
        }
        t_lo = t;
        break;
    }
    if (!binary_refine) return;
    while (t_hi - t_lo > eps * t_lo) {
        const double mid = 0.5 * (t_lo + t_hi);
        MwuOutcome o = mwu_round(R, g, b, mid, eps, kappa, mc);
        absorb(st, o, mid);
        if (o.is_flow)
            t_hi = mid;
        else
            t_lo = mid;
    }
    // Potential extraction just below the bracket; a flow here would certify
    // opt <= t_lo, so treat either answer as usable.
    {
        const double td = t_lo / (1.0 + eps);
        MwuOutcome o = mwu_round(R, g, b, td, eps, kappa, mc);
        absorb(st, o, td);
    }
    // Flow extraction just above.
    if (!st.have_flow || st.best_flow_t > t_hi) {
        const double tf = t_hi * (1.0 + 1e-12);
        MwuOutcome o = mwu_round(R, g, b, tf, eps, kappa, mc);
        absorb(st, o, tf);
    }
}

} // namespace

Flow repair_residual(const Graph& g, Flow f, const DemandVector& b, int rounds,
                     const RoutingMatrix& R, double kappa, double eps, const SolverConfig& cfg,
                     long* iterations, int* oracle_calls) {
    const auto mst = minimum_spanning_tree(g);
    const MwuConfig mc = make_mwu_config(cfg);
    const double b_scale = std::max(1.0, b.l1_norm());

    for (int round = 0; round < rounds; ++round) {
        DemandVector r = divergence(g, f);
        for (size_t i = 0; i < r.values.size(); ++i)
            r.values[i] = b.values[i] - r.values[i];
        if (r.l1_norm() <= 1e-12 * b_scale) break;

        const double t0 = flow_cost(g, route_on_tree(g, mst, r));
        if (t0 <= 0.0) break;
        // Descent-only extraction: a 2-approximate residual flow is enough
        // because each round shrinks the leftover demand geometrically.
        SearchState st;
        bracket_opt(g, r, eps, R, kappa, mc, t0, false, st);
        if (iterations) *iterations += st.rounds;
        if (oracle_calls) *oracle_calls += st.calls;
        if (!st.have_flow) break;
        for (size_t i = 0; i < f.values.size(); ++i) f.values[i] += st.best_flow.values[i];
    }

    // Exact closure over the MST.
    DemandVector r = divergence(g, f);
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] = b.values[i] - r.values[i];
    if (r.l1_norm() > 0.0) {
        const Flow tree_flow = route_on_tree(g, mst, r);
        for (size_t i = 0; i < f.values.size(); ++i) f.values[i] += tree_flow.values[i];
    }
    return f;
}

SolveReport solve_transshipment(const Graph& g, const DemandVector& b, double eps,
                                const RoutingMatrix& R, double kappa, const SolverConfig& cfg) {
    if (static_cast<int>(b.values.size()) != g.vertex_count())
        throw std::invalid_argument("solve_transshipment: demand index mismatch");
    if (!g.connected()) throw std::invalid_argument("solve_transshipment: disconnected graph");
    if (!b.balanced(demand_balance_tol(b) + 1e-12))
        throw std::invalid_argument("solve_transshipment: unbalanced demands");
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("solve_transshipment: eps must be in (0,1]");

    SolveReport rep;
    rep.epsilon = eps;
    const int n = g.vertex_count();
    rep.flow.values.assign(static_cast<size_t>(g.edge_count()), 0.0);
    rep.potential.values.assign(static_cast<size_t>(n), 0.0);
    if (b.l1_norm() == 0.0) return rep;

    // Tiny eps: approximation machinery costs more than the exact oracle.
    if (eps < cfg.exact_fallback_eps_scale / (static_cast<double>(n) * n) &&
        n <= kOracleSizeCap) {
        OracleResult o = exact_transshipment(g, b);
        rep.flow = *o.witness_flow;
        rep.potential = *o.witness_potential;
        rep.primal_cost = o.opt_cost;
        rep.dual_value = dot(o.witness_potential->values, b.values);
        rep.used_exact_fallback = true;
        return rep;
    }

    const double kappa_eff = cfg.kappa_override > 0.0 ? cfg.kappa_override : kappa;
    const MwuConfig mc = make_mwu_config(cfg);
    const auto mst = minimum_spanning_tree(g);
    const double t0 = flow_cost(g, route_on_tree(g, mst, b));

    double eps_int = std::max(eps / 3.0, cfg.eps_floor);
    for (int attempt = 0; attempt < 2; ++attempt) {
        SearchState st;
        bracket_opt(g, b, eps_int, R, kappa_eff, mc, t0, true, st);
        rep.iterations += st.rounds;
        rep.oracle_calls += st.calls;
        if (!st.have_flow || !st.have_potential)
            throw std::runtime_error("solve_transshipment: search ended without both certificates");

        const int repair_rounds = cfg.max_repair_rounds >= 0
                                      ? cfg.max_repair_rounds
                                      : static_cast<int>(std::ceil(std::log2(std::max(2, n))));
        Flow f = repair_residual(g, st.best_flow, b, repair_rounds, R, kappa_eff, eps_int, cfg,
                                 &rep.iterations, &rep.oracle_calls);
        rep.repair_rounds = repair_rounds;
        rep.flow = std::move(f);
        rep.potential = st.best_potential;
        rep.primal_cost = flow_cost(g, rep.flow);
        rep.dual_value = dot(rep.potential.values, b.values);
        if (rep.primal_cost <= (1.0 + eps) * rep.dual_value || eps_int <= cfg.eps_floor)
            break;
        eps_int = std::max(eps_int / 2.0, cfg.eps_floor); // tighten and retry once
    }
    return rep;
}

} // namespace tsh
