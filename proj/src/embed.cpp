#include "tsh/embed.hpp"

#include "tsh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsh {

double Embedding::l1_distance(VertexId u, VertexId v) const {
    const auto& a = points[static_cast<size_t>(u)];
    const auto& b = points[static_cast<size_t>(v)];
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

SsspPotential exact_potential_oracle(const Graph& g, const std::vector<VertexId>& S) {
    SsspPotential p = {};
    ShortestPaths sp = dijkstra(g, S);
    p.base.values = std::move(sp.dist);
    p.source_set = S;
    p.alpha = 1.0;
    return p;
}

Embedding bourgain_embed(const Graph& g, const PotentialOracle& oracle, BourgainParams params,
                         std::uint64_t seed) {
    if (!g.connected()) throw std::invalid_argument("bourgain_embed: graph must be connected");
    const int n = g.vertex_count();
    const double log2n = std::log2(std::max(2.0, static_cast<double>(n)));
    const int N = params.num_rounds > 0 ? params.num_rounds
                                        : static_cast<int>(std::ceil(params.c_n * log2n));
    const int T = params.num_levels > 0 ? params.num_levels
                                        : static_cast<int>(std::ceil(log2n));

    Embedding emb;
    emb.dimension = N * T;
    emb.points.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(N * T), 0.0));
    const double inv_nt = 1.0 / static_cast<double>(N * T);

    for (int i = 0; i < N; ++i) {
        for (int t = 1; t <= T; ++t) {
            // Per-trial derived stream: identical result no matter the order
            // in which (i, t) trials execute.
            Rng rng = derive_rng(seed, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(t));
            const double p_include = std::ldexp(1.0, -t);
            std::vector<VertexId> S;
            for (VertexId v = 0; v < n; ++v)
                if (rng.uniform01() < p_include) S.push_back(v);
            const int coord = i * T + (t - 1);
            if (S.empty()) continue; // all-zero coordinate keeps the upper bound

            SsspPotential phi = oracle(g, S);
            if (!validate_potential(g, phi.base))
                throw std::runtime_error("bourgain_embed: oracle returned infeasible potential at trial (i=" +
                                         std::to_string(i) + ", t=" + std::to_string(t) + ")");
            // Equal value on S, then shift so the minimum is 0: any common
            // shift is distance-invariant but keeps coordinates comparable.
            const double sval = phi.base.values[static_cast<size_t>(S.front())];
            for (VertexId s : S) phi.base.values[static_cast<size_t>(s)] = sval;
            const double mn =
                *std::min_element(phi.base.values.begin(), phi.base.values.end());
            for (VertexId v = 0; v < n; ++v)
                emb.points[static_cast<size_t>(v)][static_cast<size_t>(coord)] =
                    (phi.base.values[static_cast<size_t>(v)] - mn) * inv_nt;
        }
    }
    auto [c, x] = measure_distortion(emb, g);
    emb.measured_contraction = c;
    emb.measured_expansion = x;
    emb.scale = c > 0.0 ? 1.0 / c : 1.0;
    return emb;
}

Embedding jl_reduce(const Embedding& e, const Graph& g, int target_dim, std::uint64_t seed,
                    bool identity_mode) {
    if (target_dim <= 0) throw std::invalid_argument("jl_reduce: target_dim must be positive");
    Embedding out;
    out.dimension = target_dim;
    out.points.assign(e.points.size(), std::vector<double>(static_cast<size_t>(target_dim), 0.0));

    if (identity_mode) {
        if (target_dim != e.dimension)
            throw std::invalid_argument("jl_reduce: identity mode needs target_dim == k");
        out.points = e.points;
    } else {
        // Sign matrix P in {-1,+1}^(target x k), rows applied as P x / sqrt(target).
        Rng rng = derive_rng(seed, 0x6a6cULL);
        const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(target_dim));
        std::vector<std::vector<double>> proj(
            static_cast<size_t>(target_dim), std::vector<double>(static_cast<size_t>(e.dimension)));
        for (auto& row : proj)
            for (double& x : row) x = rng.coin() ? inv_sqrt : -inv_sqrt;
        for (size_t v = 0; v < e.points.size(); ++v) {
            const auto& src = e.points[v];
            auto& dst = out.points[v];
            for (int r = 0; r < target_dim; ++r) {
                double acc = 0.0;
                const auto& row = proj[static_cast<size_t>(r)];
                for (size_t i = 0; i < src.size(); ++i) acc += row[i] * src[i];
                dst[static_cast<size_t>(r)] = acc;
            }
        }
    }
    auto [c, x] = measure_distortion(out, g);
    out.measured_contraction = c;
    out.measured_expansion = x;
    out.scale = c > 0.0 ? 1.0 / c : 1.0;
    return out;
}

std::pair<double, double> measure_distortion(const Embedding& e, const Graph& g, int pair_budget,
                                             std::uint64_t seed) {
    const int n = g.vertex_count();
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0.0;
    bool any = false;
    auto consider = [&](VertexId u,VertexId v, double duv) {
        if (!(duv > 0.0) || !std::isfinite(duv)) return;
        const double r = e.l1_distance(u, v) / duv;
        cmin = std::min(cmin, r);
        cmax = std::max(cmax, r);
        any = true;
    };
    if (n <= 512) {
        for (VertexId u = 0; u < n; ++u) {
            const auto sp = dijkstra(g, {u});
            for (VertexId v = u + 1; v < n; ++v) consider(u, v, sp.dist[static_cast<size_t>(v)]);
        }
    } else {
        Rng rng = derive_rng(seed, 0xd157ULL);
        for (int i = 0; i < pair_budget / std::max(1, n); ++i) {
            const auto u = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n)));
            const auto sp = dijkstra(g, {u});
            for (int j = 0; j < n / 8 + 1; ++j) {
                const auto v =
                    static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n)));
                if (v != u) consider(u, v, sp.dist[static_cast<size_t>(v)]);
            }
        }
    }
    if (!any) return {0.0, 0.0};
    return {cmin, cmax};
}

} // namespace tsh
