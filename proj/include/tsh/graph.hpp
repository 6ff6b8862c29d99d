#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsh {

using VertexId = int;
using EdgeId = int;

struct EdgeRec {
    VertexId u;
    VertexId v;
    double w;
};

// Weighted undirected graph in flat adjacency form. Immutable after
// construction; every algorithm in the library reads it concurrently without
// synchronization.
class Graph {
public:
    Graph() = default;
    Graph(int vertex_count, std::vector<EdgeRec> edges);

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const EdgeRec& edge(EdgeId e) const { return edges_[static_cast<size_t>(e)]; }
    const std::vector<EdgeRec>& edges() const { return edges_; }

    // Per-vertex list of (neighbor, edge id).
    const std::vector<std::pair<VertexId, EdgeId>>& adjacency(VertexId v) const {
        return adj_[static_cast<size_t>(v)];
    }

    bool connected() const { return connected_; }
    double max_weight() const { return max_w_; }
    double min_weight() const { return min_w_; }

private:
    int n_ = 0;
    std::vector<EdgeRec> edges_;
    std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj_;
    bool connected_ = true;
    double max_w_ = 0.0;
    double min_w_ = 0.0;
};

// Vertex demands b. Sign convention, used everywhere in the library:
// positive divergence means net inflow, so a flow f "satisfies b" when
// divergence(f) = b with sources negative (b_s < 0) and sinks positive.
struct DemandVector {
    std::vector<double> values;

    double sum() const;
    double l1_norm() const;
    bool balanced(double tol) const;
    bool integral(double tol = 1e-9) const;
};

// Signed edge flow; positive f_e means flow from edge(e).u toward edge(e).v.
struct Flow {
    std::vector<double> values;
};

// Vertex potential (dual of the transshipment LP).
struct Potential {
    std::vector<double> values;
};

// Potential that additionally lower-approximates distances from a source set.
struct SsspPotential {
    Potential base;
    std::vector<VertexId> source_set;
    double alpha = 1.0;
};

// Balance / feasibility tolerances; double accumulation over <= 1e6 edges.
inline double demand_balance_tol(const DemandVector& b) { return 1e-9 * b.l1_norm(); }
constexpr double kFeasRelTol = 1e-9;

// divergence(g, f)_v = (inflow - outflow) at v.  This is A*f for the
// incidence matrix whose column for edge e=(u,v) is chi_v - chi_u.
DemandVector divergence(const Graph& g, const Flow& f);

// Sum over edges of w_e * |f_e|.
double flow_cost(const Graph& g, const Flow& f);

// (A^T phi)_e = phi(v) - phi(u) for edge e=(u,v); adjoint of divergence:
// divergence(f) . z == f . edge_difference(z) for all f, z.
std::vector<double> edge_difference(const Graph& g, const std::vector<double>& phi);

// Edge scan of |phi(u)-phi(v)| <= w(u,v), with per-edge slack tol_rel*w.
bool validate_potential(const Graph& g, const Potential& phi, double tol_rel = kFeasRelTol);

// Checks the three S-SSSP potential properties against supplied exact
// multi-source distances d(S, .): equal value on S, phi(v)-phi(S) >=
// d(S,v)/alpha, and edge-Lipschitz feasibility.
bool validate_sssp_potential(const Graph& g, const SsspPotential& p,
                             const std::vector<double>& exact_dist_from_S,
                             std::string* why = nullptr);

struct ShortestPaths {
    std::vector<double> dist;          // +inf when unreachable
    std::vector<VertexId> parent;      // -1 for sources and unreachable vertices
    std::vector<EdgeId> parent_edge;   // -1 likewise
};

// Exact multi-source Dijkstra. Throws on an empty source set.
ShortestPaths dijkstra(const Graph& g, const std::vector<VertexId>& sources);

// Connected components; returns component id per vertex and component count.
std::pair<std::vector<int>, int> connected_components(const Graph& g);

} // namespace tsh
