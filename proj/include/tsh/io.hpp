#pragma once

#include "tsh/embed.hpp"
#include "tsh/graph.hpp"
#include "tsh/sssp.hpp"

#include <iosfwd>
#include <string>

namespace tsh {

// Edge-list format: first line "n m", then m lines "u v w" (0-based, decimal).
Graph read_graph(std::istream& is);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& os, const Graph& g);

// Demand file: lines "v b_v"; unlisted vertices default to 0.
DemandVector read_demands(std::istream& is, int n);
DemandVector read_demands_file(const std::string& path, int n);
void write_demands(std::ostream& os, const DemandVector& b);

// Flow file: "m" then per-edge "u v f" in edge order.
void write_flow(std::ostream& os, const Graph& g, const Flow& f);
Flow read_flow(std::istream& is, const Graph& g);

// Potential file: lines "v phi_v".
void write_potential(std::ostream& os, const Potential& phi);
Potential read_potential(std::istream& is, int n);

// Tree output: lines "v parent(v) d*(v)" (parent -1 at the source).
void write_sssp_tree(std::ostream& os, const SsspResult& r);
struct TreeFile {
    std::vector<VertexId> parent;
    std::vector<double> dist;
};
TreeFile read_sssp_tree(std::istream& is, int n);

// Embedding dump: "n k scale" header then n lines of k decimals.
void write_embedding(std::ostream& os, const Embedding& e);

std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& content);

} // namespace tsh
