#include "tsh/routing.hpp"

#include "tsh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace tsh {

double l1_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

namespace {

double min_distinct_pair_distance(const PointSet& pts) {
    double mn = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            const double d = l1_dist(pts[i], pts[j]);
            if (d > 0.0) mn = std::min(mn, d);
        }
    return mn;
}

double l1_diameter(const PointSet& pts) {
    // Coordinate-wise ranges bound the l1 diameter within factor 1; using the
    // sum of ranges is exact enough for choosing the level count.
    if (pts.empty()) return 0.0;
    double total = 0.0;
    for (size_t i = 0; i < pts[0].size(); ++i) {
        double lo = pts[0][i], hi = pts[0][i];
        for (const auto& p : pts) {
            lo = std::min(lo, p[i]);
            hi = std::max(hi, p[i]);
        }
        total += hi - lo;
    }
    return total;
}

} // namespace

RoutingParams RoutingParams::resolved(int n, int k, const PointSet& points) const {
    RoutingParams r = *this;
    if (r.w <= 0.0) r.w = std::max(2.0, 2.0 * static_cast<double>(k));
    if (r.s <= 0) {
        const double l = std::log2(std::max(2.0, static_cast<double>(n)));
        r.s = static_cast<int>(std::ceil(4.0 * l * l));
    }
    if (r.num_levels <= 0) {
        const double diam = std::max(1.0, l1_diameter(points));
        r.num_levels = std::max(1, static_cast<int>(std::ceil(std::log(diam) / std::log(r.w))));
    }
    return r;
}

double normalize_for_routing(PointSet& points) {
    const double mn = min_distinct_pair_distance(points);
    if (!std::isfinite(mn) || mn <= 0.0) return 1.0;
    const double factor = 1.0 / mn;
    for (auto& p : points)
        for (double& x : p) x *= factor;
    return factor;
}

ShiftStream::ShiftStream(std::uint64_t seed, double w, int k) : seed_(seed), w_(w), k_(k) {}

void ShiftStream::ensure(int level, int trial) const {
    if (static_cast<size_t>(level) >= cache_.size()) cache_.resize(static_cast<size_t>(level) + 1);
    auto& lv = cache_[static_cast<size_t>(level)];
    if (static_cast<size_t>(trial) >= lv.size()) lv.resize(static_cast<size_t>(trial) + 1);
}

const std::vector<double>& ShiftStream::shift(int level, int trial) const {
    ensure(level, trial);
    auto& sh = cache_[static_cast<size_t>(level)][static_cast<size_t>(trial)];
    if (sh.empty()) {
        Rng rng = derive_rng(seed_, 0x67696472ULL, static_cast<std::uint64_t>(level),
                             static_cast<std::uint64_t>(trial));
        const double W = width(level);
        sh.resize(static_cast<size_t>(k_));
        for (double& x : sh) x = rng.uniform(W);
    }
    return sh;
}

double ShiftStream::width(int level) const { return std::pow(w_, level); }

namespace {

struct CellKey {
    std::int32_t trial;
    std::vector<std::int64_t> z;
    bool operator==(const CellKey& o) const { return trial == o.trial && z == o.z; }
};

struct CellKeyHash {
    size_t operator()(const CellKey& key) const {
        std::uint64_t h = 0x243f6a8885a308d3ull ^ static_cast<std::uint64_t>(key.trial);
        for (std::int64_t v : key.z) {
            std::uint64_t x = static_cast<std::uint64_t>(v);
            h = splitmix64(h ^= x);
        }
        return static_cast<size_t>(h);
    }
};

using CellMap = std::unordered_map<CellKey, double, CellKeyHash>;

std::vector<std::int64_t> position_bits(const std::vector<double>& p) {
    std::vector<std::int64_t> z(p.size());
    std::memcpy(z.data(), p.data(), p.size() * sizeof(double));
    return z;
}

std::vector<double> cell_position(const Cell& c, int level, const ShiftStream& shifts, int k) {
    std::vector<double> p(static_cast<size_t>(k));
    if (level == 0) {
        std::memcpy(p.data(), c.z.data(), static_cast<size_t>(k) * sizeof(double));
        return p;
    }
    const double W = shifts.width(level - 1);
    const auto& r = shifts.shift(level - 1, c.trial);
    for (int i = 0; i < k; ++i)
        p[static_cast<size_t>(i)] =
            static_cast<double>(c.z[static_cast<size_t>(i)]) * W - r[static_cast<size_t>(i)];
    return p;
}

// One snap: maps position p under grid (W, r). Returns integer cell vector;
// the snapped position is z*W - r, coordinatewise in (p - W, p].
std::vector<std::int64_t> snap(const std::vector<double>& p, double W,
                               const std::vector<double>& r) {
    std::vector<std::int64_t> z(p.size());
    for (size_t i = 0; i < p.size(); ++i)
        z[i] = static_cast<std::int64_t>(std::floor((p[i] + r[i]) / W));
    return z;
}

// Core iteration shared by run_routing and the basis builder: advances the
// active cells at `level` through all s trials. Returns the movement cost.
double advance_level(std::vector<Cell>& active, int level, const ShiftStream& shifts, int k, int s,
                     std::vector<Cell>& next_out) {
    const double W = shifts.width(level);
    const double inv_s = 1.0 / static_cast<double>(s);
    CellMap next;
    double cost = 0.0;
    for (const Cell& c : active) {
        if (c.mass == 0.0) continue;
        const std::vector<double> pos = cell_position(c, level, shifts, k);
        const double share = c.mass * inv_s;
        for (int j = 0; j < s; ++j) {
            const auto& r = shifts.shift(level, j);
            CellKey key{j, snap(pos, W, r)};
            // Movement distance: sum of fractional parts (pos + r) mod W.
            double moved = 0.0;
            for (int i = 0; i < k; ++i)
                moved += pos[static_cast<size_t>(i)] + r[static_cast<size_t>(i)] -
                         static_cast<double>(key.z[static_cast<size_t>(i)]) * W;
            cost += std::abs(share) * moved;
            next[std::move(key)] += share;
        }
    }
    next_out.clear();
    next_out.reserve(next.size());
    for (auto& [key, mass] : next) next_out.push_back(Cell{key.trial, key.z, mass});
    // Deterministic ordering regardless of hash-map iteration order.
    std::sort(next_out.begin(), next_out.end(), [](const Cell& a, const Cell& b) {
        if (a.trial != b.trial) return a.trial < b.trial;
        return a.z < b.z;
    });
    return cost;
}

double abs_mass(const std::vector<Cell>& cells) {
    double s = 0.0;
    for (const Cell& c : cells) s += std::abs(c.mass);
    return s;
}

} // namespace

RoutingTrace run_routing(const PointSet& points, const std::vector<double>& b,
                         const RoutingParams& params_in, std::uint64_t seed) {
    if (points.size() != b.size())
        throw std::invalid_argument("run_routing: point/demand size mismatch");
    RoutingTrace trace;
    if (points.empty()) return trace;
    const int k = static_cast<int>(points[0].size());
    const int n = static_cast<int>(points.size());
    const RoutingParams params = params_in.resolved(n, k, points);

    const double min_pair = min_distinct_pair_distance(points);
    if (std::isfinite(min_pair) && min_pair < 0.999)
        throw std::invalid_argument("run_routing: points not normalized (min pairwise distance < 1)");

    bool any = false;
    for (double x : b) any |= (x != 0.0);
    if (!any) return trace; // zero demand: zero cost, empty trace

    ShiftStream shifts(seed, params.w, k);

    // Level 0: raw positions, coincident points share a cell.
    CellMap initial;
    for (int v = 0; v < n; ++v) {
        if (b[static_cast<size_t>(v)] == 0.0) continue;
        initial[CellKey{-1, position_bits(points[static_cast<size_t>(v)])}] +=
            b[static_cast<size_t>(v)];
    }
    std::vector<Cell> active;
    for (auto& [key, mass] : initial) active.push_back(Cell{key.trial, key.z, mass});
    std::sort(active.begin(), active.end(), [](const Cell& a, const Cell& b2) {
        return a.z < b2.z;
    });

    trace.level_abs_mass.push_back(abs_mass(active));
    for (int t = 0; t < params.num_levels + 1; ++t) {
        std::vector<Cell> next;
        const double cost = advance_level(active, t, shifts, k, params.s, next);
        trace.iteration_costs.push_back(cost);
        trace.total_cost += cost;
        active = std::move(next);
        trace.level_abs_mass.push_back(abs_mass(active));
    }

    // Final merge: all residual demand moves to one surviving point.
    if (!active.empty()) {
        const int top = params.num_levels + 1;
        const std::vector<double> target = cell_position(active.front(), top, shifts, k);
        double cost = 0.0;
        for (size_t i = 1; i < active.size(); ++i)
            cost += std::abs(active[i].mass) * l1_dist(cell_position(active[i], top, shifts, k), target);
        trace.iteration_costs.push_back(cost);
        trace.total_cost += cost;
        trace.final_point = target;
    }
    return trace;
}

std::pair<std::vector<BasisHistory>, std::uint64_t>
build_basis_histories(const PointSet& points, const RoutingParams& params_in, std::uint64_t seed) {
    if (points.empty()) return {{}, seed};
    const int k = static_cast<int>(points[0].size());
    const int n = static_cast<int>(points.size());
    const RoutingParams params = params_in.resolved(n, k, points);
    const size_t cap = static_cast<size_t>(params.support_cap_factor) *
                       static_cast<size_t>(params.s);

    for (int attempt = 0; attempt <= params.max_restarts; ++attempt) {
        const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(attempt);
        ShiftStream shifts(run_seed, params.w, k);
        std::vector<BasisHistory> histories;
        histories.reserve(static_cast<size_t>(n));
        bool blown = false;
        for (int v = 0; v < n && !blown; ++v) {
            BasisHistory h;
            h.vertex = v;
            h.levels.resize(static_cast<size_t>(params.num_levels + 2));
            h.levels[0] = {Cell{-1, position_bits(points[static_cast<size_t>(v)]), 1.0}};
            for (int t = 0; t < params.num_levels + 1; ++t) {
                std::vector<Cell> next;
                advance_level(h.levels[static_cast<size_t>(t)], t, shifts, k, params.s, next);
                if (next.size() > cap) {
                    blown = true;
                    break;
                }
                h.levels[static_cast<size_t>(t + 1)] = std::move(next);
            }
            if (!blown) histories.push_back(std::move(h));
        }
        if (!blown) return {std::move(histories), run_seed};
    }
    throw std::runtime_error("build_basis_histories: support cap exceeded on every restart");
}

RoutingMatrix assemble_matrix(const std::vector<BasisHistory>& histories,
                              const RoutingParams& params_in, int n, int k, std::uint64_t seed) {
    RoutingMatrix m;
    m.n_ = n;
    m.dim_k = k;
    m.seed = seed;
    // histories were built with resolved params; trust the caller's copy.
    RoutingParams params = params_in;
    m.w = params.w;
    m.s = params.s;
    m.num_levels = params.num_levels;

    struct FullKey {
        std::int16_t level;
        std::int32_t trial;
        std::vector<std::int64_t> z;
        bool operator<(const FullKey& o) const {
            if (level != o.level) return level < o.level;
            if (trial != o.trial) return trial < o.trial;
            return z < o.z;
        }
    };
    // (level, cell) -> list of (vertex, coefficient)
    std::map<FullKey, std::vector<std::pair<VertexId, double>>> rows;
    for (const BasisHistory& h : histories) {
        for (size_t t = 0; t < h.levels.size(); ++t) {
            const double coef_scale =
                static_cast<double>(k) * std::pow(params.w, static_cast<double>(t));
            for (const Cell& c : h.levels[t])
                rows[FullKey{static_cast<std::int16_t>(t), c.trial, c.z}].emplace_back(
                    h.vertex, coef_scale * c.mass);
        }
    }

    m.row_ptr_.push_back(0);
    for (auto& [key, entries] : rows) {
        std::sort(entries.begin(), entries.end());
        for (auto& [v, coef] : entries) {
            m.col_.push_back(v);
            m.vals_.push_back(coef);
        }
        m.row_ptr_.push_back(static_cast<std::int64_t>(m.col_.size()));
        m.meta_.push_back(RoutingMatrix::RowMeta{key.level, static_cast<std::int16_t>(key.trial),
                                                 key.z});
    }
    m.build_column_view();
    return m;
}

void RoutingMatrix::build_column_view() {
    std::vector<std::int64_t> count(static_cast<size_t>(n_) + 1, 0);
    for (VertexId v : col_) ++count[static_cast<size_t>(v) + 1];
    for (size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    col_ptr_ = count;
    col_rows_.resize(vals_.size());
    col_vals_.resize(vals_.size());
    std::vector<std::int64_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
    for (int row = 0; row < rows(); ++row) {
        for (std::int64_t i = row_ptr_[static_cast<size_t>(row)];
             i < row_ptr_[static_cast<size_t>(row) + 1]; ++i) {
            const auto v = static_cast<size_t>(col_[static_cast<size_t>(i)]);
            const auto at = static_cast<size_t>(cursor[v]++);
            col_rows_[at] = row;
            col_vals_[at] = vals_[static_cast<size_t>(i)];
        }
    }
}

std::vector<double> RoutingMatrix::matvec(const std::vector<double>& b) const {
    if (static_cast<int>(b.size()) != n_)
        throw std::invalid_argument("RoutingMatrix::matvec: size mismatch");
    std::vector<double> out(static_cast<size_t>(rows()), 0.0);
    for (int row = 0; row < rows(); ++row) {
        double acc = 0.0;
        for (std::int64_t i = row_ptr_[static_cast<size_t>(row)];
             i < row_ptr_[static_cast<size_t>(row) + 1]; ++i)
            acc += vals_[static_cast<size_t>(i)] * b[static_cast<size_t>(col_[static_cast<size_t>(i)])];
        out[static_cast<size_t>(row)] = acc;
    }
    return out;
}

std::vector<double> RoutingMatrix::matvec_transposed(const std::vector<double>& y) const {
    if (static_cast<int>(y.size()) != rows())
        throw std::invalid_argument("RoutingMatrix::matvec_transposed: size mismatch");
    std::vector<double> out(static_cast<size_t>(n_), 0.0);
    // Fixed index order (row major) so results are evaluation-order stable.
    for (int row = 0; row < rows(); ++row) {
        const double yr = y[static_cast<size_t>(row)];
        if (yr == 0.0) continue;
        for (std::int64_t i = row_ptr_[static_cast<size_t>(row)];
             i < row_ptr_[static_cast<size_t>(row) + 1]; ++i)
            out[static_cast<size_t>(col_[static_cast<size_t>(i)])] +=
                yr * vals_[static_cast<size_t>(i)];
    }
    return out;
}

double RoutingMatrix::estimate_cost(const std::vector<double>& b) const {
    double s = 0.0;
    for (double x : matvec(b)) s += std::abs(x);
    return s;
}

double RoutingMatrix::two_point_cost(VertexId u, VertexId v) const {
    // Merge the two column slices; rows appearing in both partially cancel.
    std::int64_t iu = col_ptr_[static_cast<size_t>(u)], eu = col_ptr_[static_cast<size_t>(u) + 1];
    std::int64_t iv = col_ptr_[static_cast<size_t>(v)], ev = col_ptr_[static_cast<size_t>(v) + 1];
    double s = 0.0;
    while (iu < eu || iv < ev) {
        const std::int32_t ru = iu < eu ? col_rows_[static_cast<size_t>(iu)]
                                        : std::numeric_limits<std::int32_t>::max();
        const std::int32_t rv = iv < ev ? col_rows_[static_cast<size_t>(iv)]
                                        : std::numeric_limits<std::int32_t>::max();
        if (ru < rv) {
            s += std::abs(col_vals_[static_cast<size_t>(iu)]);
            ++iu;
        } else if (rv < ru) {
            s += std::abs(col_vals_[static_cast<size_t>(iv)]);
            ++iv;
        } else {
            s += std::abs(col_vals_[static_cast<size_t>(iu)] - col_vals_[static_cast<size_t>(iv)]);
            ++iu;
            ++iv;
        }
    }
    return s;
}

void RoutingMatrix::scale_all(double factor) {
    for (double& v : vals_) v *= factor;
    for (double& v : col_vals_) v *= factor;
    applied_scale *= factor;
}

void RoutingMatrix::dump(std::ostream& os) const {
    os << "# routing-matrix w=" << w << " s=" << s << " T=" << num_levels << " k=" << dim_k
       << " seed=" << seed << " scale=" << applied_scale << " rows=" << rows() << "\n";
    for (int row = 0; row < rows(); ++row) {
        const RowMeta& meta = meta_[static_cast<size_t>(row)];
        os << static_cast<int>(meta.level) << " " << meta.trial << ":";
        for (std::int64_t zi : meta.z) os << "," << zi;
        os << " {";
        bool first = true;
        for (std::int64_t i = row_ptr_[static_cast<size_t>(row)];
             i < row_ptr_[static_cast<size_t>(row) + 1]; ++i) {
            if (!first) os << ",";
            first = false;
            os << col_[static_cast<size_t>(i)] << ":" << vals_[static_cast<size_t>(i)];
        }
        os << "}\n";
    }
}

CalibrationReport calibrate(RoutingMatrix& m, const PointSet& points, int sample_pairs,
                            std::uint64_t seed) {
    CalibrationReport rep;
    const int n = static_cast<int>(points.size());
    if (n < 2) return rep;
    Rng rng = derive_rng(seed, 0xca11ULL);
    double min_ratio = std::numeric_limits<double>::infinity();
    double max_ratio = 0.0;
    for (int i = 0; i < sample_pairs; ++i) {
        const auto u = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n)));
        auto v = static_cast<VertexId>(rng.next_below(static_cast<std::uint64_t>(n)));
        if (u == v) v = (v + 1) % n;
        const double d = l1_dist(points[static_cast<size_t>(u)], points[static_cast<size_t>(v)]);
        if (d <= 0.0) {
            ++rep.pairs_skipped;
            continue;
        }
        const double ratio = m.two_point_cost(u, v) / d;
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
        ++rep.pairs_used;
    }
    if (rep.pairs_used == 0 || !(min_ratio > 0.0)) return rep;
    const double factor = 1.01 / min_ratio;
    m.scale_all(factor);
    rep.scale_applied = factor;
    rep.kappa = max_ratio * factor;
    return rep;
}

} // namespace tsh
