#include "tsh/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tsh {

Graph read_graph(std::istream& is) {
    int n = 0, m = 0;
    if (!(is >> n >> m)) throw std::runtime_error("read_graph: missing header");
    std::vector<EdgeRec> edges;
    edges.reserve(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        EdgeRec r{};
        if (!(is >> r.u >> r.v >> r.w)) throw std::runtime_error("read_graph: truncated edge list");
        edges.push_back(r);
    }
    return Graph(n, std::move(edges));
}

Graph read_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open graph file: " + path);
    return read_graph(f);
}

void write_graph(std::ostream& os, const Graph& g) {
    os << g.vertex_count() << " " << g.edge_count() << "\n";
    os << std::setprecision(17);
    for (const EdgeRec& r : g.edges()) os << r.u << " " << r.v << " " << r.w << "\n";
}

DemandVector read_demands(std::istream& is, int n) {
    DemandVector b;
    b.values.assign(static_cast<size_t>(n), 0.0);
    int v;
    double x;
    while (is >> v >> x) {
        if (v < 0 || v >= n) throw std::runtime_error("read_demands: vertex out of range");
        b.values[static_cast<size_t>(v)] += x;
    }
    return b;
}

DemandVector read_demands_file(const std::string& path, int n) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open demand file: " + path);
    return read_demands(f, n);
}

void write_demands(std::ostream& os, const DemandVector& b) {
    os << std::setprecision(17);
    for (size_t v = 0; v < b.values.size(); ++v)
        if (b.values[v] != 0.0) os << v << " " << b.values[v] << "\n";
}

void write_flow(std::ostream& os, const Graph& g, const Flow& f) {
    os << g.edge_count() << "\n" << std::setprecision(17);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        os << g.edge(e).u << " " << g.edge(e).v << " " << f.values[static_cast<size_t>(e)] << "\n";
}

Flow read_flow(std::istream& is, const Graph& g) {
    int m = 0;
    if (!(is >> m) || m != g.edge_count())
        throw std::runtime_error("read_flow: edge count mismatch");
    Flow f;
    f.values.resize(static_cast<size_t>(m));
    for (EdgeId e = 0; e < m; ++e) {
        int u, v;
        double x;
        if (!(is >> u >> v >> x)) throw std::runtime_error("read_flow: truncated");
        if (u != g.edge(e).u || v != g.edge(e).v)
            throw std::runtime_error("read_flow: edge order mismatch at " + std::to_string(e));
        f.values[static_cast<size_t>(e)] = x;
    }
    return f;
}

void write_potential(std::ostream& os, const Potential& phi) {
    os << std::setprecision(17);
    for (size_t v = 0; v < phi.values.size(); ++v) os << v << " " << phi.values[v] << "\n";
}

Potential read_potential(std::istream& is, int n) {
    Potential p;
    p.values.assign(static_cast<size_t>(n), 0.0);
    int v;
    double x;
    while (is >> v >> x) {
        if (v < 0 || v >= n) throw std::runtime_error("read_potential: vertex out of range");
        p.values[static_cast<size_t>(v)] = x;
    }
    return p;
}

void write_sssp_tree(std::ostream& os, const SsspResult& r) {
    os << std::setprecision(17);
    for (size_t v = 0; v < r.parent.size(); ++v)
        os << v << " " << r.parent[v] << " " << r.dist[v] << "\n";
}

TreeFile read_sssp_tree(std::istream& is, int n) {
    TreeFile t;
    t.parent.assign(static_cast<size_t>(n), -1);
    t.dist.assign(static_cast<size_t>(n), 0.0);
    int v, p;
    double d;
    while (is >> v >> p >> d) {
        if (v < 0 || v >= n) throw std::runtime_error("read_sssp_tree: vertex out of range");
        t.parent[static_cast<size_t>(v)] = p;
        t.dist[static_cast<size_t>(v)] = d;
    }
    return t;
}

void write_embedding(std::ostream& os, const Embedding& e) {
    os << e.points.size() << " " << e.dimension << " " << std::setprecision(17) << e.scale
       << "\n";
    for (const auto& p : e.points) {
        for (size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << p[i];
        os << "\n";
    }
}

std::string slurp_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << content;
}

} // namespace tsh
