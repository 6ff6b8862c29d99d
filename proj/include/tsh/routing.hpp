#pragma once

#include "tsh/graph.hpp"

#include <cstdint>
#include <vector>

namespace tsh {

// Parameters of the shifted-grid routing scheme. Zeros mean "derive from the
// point set": w = max(2, 2k) so that a unit mass spreads across O(1) cells
// per trial at desk scale, s = ceil(4 * log2(n)^2), T = ceil(log_w(diameter)).
struct RoutingParams {
    double w = 0.0;
    int s = 0;
    int num_levels = 0;              // T
    int support_cap_factor = 64;     // per-vertex per-level cap is factor * s
    int max_restarts = 10;

    RoutingParams resolved(int n, int k, const std::vector<std::vector<double>>& points) const;
};

using PointSet = std::vector<std::vector<double>>;

double l1_dist(const std::vector<double>& a, const std::vector<double>& b);

// Scales the point set so the minimum pairwise l1 distance over distinct
// points is 1; returns the applied factor. Identity when no distinct pair.
double normalize_for_routing(PointSet& points);

// One grid cell with surviving mass. level 0 keys raw positions (trial -1,
// z = position bit patterns); level L >= 1 cells were created by trial
// `trial` of iteration L-1 and sit at position z * w^(L-1) - shift.
struct Cell {
    int trial;
    std::vector<std::int64_t> z;
    double mass;
};

// Sparse per-level history of one basis vertex under the shared shift stream.
struct BasisHistory {
    VertexId vertex;
    std::vector<std::vector<Cell>> levels; // index 0 .. T+1
};

struct RoutingTrace {
    std::vector<double> iteration_costs; // iterations 0..T plus the final merge
    double total_cost = 0.0;
    std::vector<double> level_abs_mass;  // sum_x |b_t(x)| for t = 0..T+1
    std::vector<double> final_point;
};

// Shared stream of grid shifts: shift(t, j) in [0, w^t)^k.
class ShiftStream {
public:
    ShiftStream(std::uint64_t seed, double w, int k);
    const std::vector<double>& shift(int level, int trial) const;
    double width(int level) const;
    double base() const { return w_; }

private:
    mutable std::vector<std::vector<std::vector<double>>> cache_; // [level][trial]
    std::uint64_t seed_;
    double w_;
    int k_;
    void ensure(int level, int trial) const;
};

// Executes the randomized routing on an explicit demand vector: iterations
// t = 0..T move b_t(x)/s from each active cell to its image under each of the
// s shifted grids, then all residual demand merges into one surviving point.
RoutingTrace run_routing(const PointSet& points, const std::vector<double>& b,
                         const RoutingParams& params, std::uint64_t seed);

// Runs the scheme once per basis vertex chi_v over the identical shift
// stream. Restarts with the next seed when any per-level support exceeds
// support_cap_factor * s. Returns the histories plus the seed that succeeded.
std::pair<std::vector<BasisHistory>, std::uint64_t>
build_basis_histories(const PointSet& points, const RoutingParams& params, std::uint64_t seed);

// Sparse row collection realizing the routing cost estimator: one row per
// (level, cell) with entry k * w^t * b_t^{chi_v}(cell) at vertex v, so that
// ||R b||_1 reproduces the estimator sum for any demand b by linearity.
class RoutingMatrix {
public:
    struct RowMeta {
        std::int16_t level;
        std::int16_t trial;
        std::vector<std::int64_t> z;
    };

    int rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
    int cols() const { return n_; }
    std::int64_t nonzeros() const { return static_cast<std::int64_t>(vals_.size()); }

    std::vector<double> matvec(const std::vector<double>& b) const;
    std::vector<double> matvec_transposed(const std::vector<double>& y) const;
    double estimate_cost(const std::vector<double>& b) const; // ||R b||_1

    // ||R (chi_u - chi_v)||_1 via the column index, without a full matvec.
    double two_point_cost(VertexId u, VertexId v) const;

    void scale_all(double factor);

    double w = 0.0;
    int s = 0;
    int num_levels = 0;
    int dim_k = 0;
    std::uint64_t seed = 0;
    double applied_scale = 1.0;

    friend RoutingMatrix assemble_matrix(const std::vector<BasisHistory>&, const RoutingParams&,
                                         int, int, std::uint64_t);

    void dump(std::ostream& os) const;

private:
    int n_ = 0;
    std::vector<std::int64_t> row_ptr_;
    std::vector<VertexId> col_;
    std::vector<double> vals_;
    std::vector<RowMeta> meta_;
    // Column view for two-point evaluations: per vertex, (row, value) pairs.
    std::vector<std::int64_t> col_ptr_;
    std::vector<std::int32_t> col_rows_;
    std::vector<double> col_vals_;
    void build_column_view();
};

RoutingMatrix assemble_matrix(const std::vector<BasisHistory>& histories,
                              const RoutingParams& params, int n, int k, std::uint64_t seed);

struct CalibrationReport {
    double scale_applied = 1.0;
    double kappa = 1.0;     // max pair ratio after scaling
    int pairs_used = 0;
    int pairs_skipped = 0;  // coincident points
};

// Enforces the lower-bound normalization opt <= ||R b||_1 on two-point
// demands: rescales so the minimum sampled ratio is 1.01 and reports the
// resulting worst-case ratio kappa.
CalibrationReport calibrate(RoutingMatrix& m, const PointSet& points, int sample_pairs,
                            std::uint64_t seed);

} // namespace tsh
