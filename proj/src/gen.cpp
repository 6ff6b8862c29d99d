#include "tsh/gen.hpp"

#include "tsh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tsh {

Graph gen_path(int n, double weight) {
    std::vector<EdgeRec> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
    return Graph(n, std::move(edges));
}

Graph gen_cycle(int n, double weight) {
    if (n < 3) throw std::invalid_argument("gen_cycle: need n >= 3");
    std::vector<EdgeRec> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
    return Graph(n, std::move(edges));
}

Graph gen_grid(int rows, int cols, double weight) {
    std::vector<EdgeRec> edges;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), weight});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), weight});
        }
    return Graph(rows * cols, std::move(edges));
}

Graph gen_complete(int n, double weight) {
    std::vector<EdgeRec> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v, weight});
    return Graph(n, std::move(edges));
}

Graph gen_random_connected(int n, int m, double weight_spread, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_random_connected: empty graph");
    const long max_m = static_cast<long>(n) * (n - 1) / 2;
    m = static_cast<int>(std::min<long>(m, max_m));
    m = std::max(m, n - 1);
    Rng rng = derive_rng(seed, 0x6e4ULL);
    auto weight = [&] { return 1.0 + rng.uniform01() * std::max(0.0, weight_spread - 1.0); };

    std::vector<EdgeRec> edges;
    std::set<std::pair<int, int>> used;
    // Random spanning tree: attach each vertex to a uniformly chosen earlier one.
    for (int v = 1; v < n; ++v) {
        const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v)));
        edges.push_back({u, v, weight()});
        used.insert({std::min(u, v), std::max(u, v)});
    }
    int guard = 0;
    while (static_cast<int>(edges.size()) < m && guard < 100 * m + 1000) {
        ++guard;
        int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (!used.insert({u, v}).second) continue;
        edges.push_back({u, v, weight()});
    }
    return Graph(n, std::move(edges));
}

DemandVector gen_random_demands(int n, int max_abs, std::uint64_t seed) {
    Rng rng = derive_rng(seed, 0xdeedULL);
    DemandVector b;
    b.values.assign(static_cast<size_t>(n), 0.0);
    if (n < 2) return b;
    long total = 0;
    for (int v = 0; v < n; ++v) {
        const long x = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(2 * max_abs + 1))) -
                       max_abs;
        b.values[static_cast<size_t>(v)] = static_cast<double>(x);
        total += x;
    }
    // Drain the imbalance across vertices without exceeding the magnitude cap.
    int v = 0;
    while (total != 0) {
        const long step = std::min<long>(std::abs(total), max_abs);
        const long fix = total > 0 ? -step : step;
        const long cur = static_cast<long>(b.values[static_cast<size_t>(v)]);
        const long room_lo = -max_abs - cur, room_hi = max_abs - cur;
        const long applied = std::clamp(fix, room_lo, room_hi);
        b.values[static_cast<size_t>(v)] += static_cast<double>(applied);
        total += applied;
        v = (v + 1) % n;
    }
    bool any = false;
    for (double x : b.values) any |= (x != 0.0);
    if (!any && n >= 2) {
        b.values[0] = -1.0;
        b.values[1] = 1.0;
    }
    return b;
}

Graph gen_by_name(const std::string& name, int n, int m, double weight_spread,
                  std::uint64_t seed) {
    if (name == "path") return gen_path(n);
    if (name == "cycle") return gen_cycle(n);
    if (name == "grid") {
        const int side = std::max(2, static_cast<int>(std::lround(std::sqrt(double(n)))));
        return gen_grid(side, side);
    }
    if (name == "complete") return gen_complete(n);
    if (name == "random-connected") return gen_random_connected(n, m, weight_spread, seed);
    throw std::invalid_argument("unknown generator: " + name);
}

} // namespace tsh
