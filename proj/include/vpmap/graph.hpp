#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

namespace vpmap {

// Undirected adjacency structure over 0-based area indices. Edges are stored
// once with a < b; neighbor listings in input files must be symmetric.
struct AdjacencyGraph {
    int n_areas = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> neighbor_counts;
    std::vector<std::vector<int>> components; // disjoint, exhaustive, ascending

    int n_components() const { return static_cast<int>(components.size()); }
    int n_singletons() const;
    // Components with more than one area, in discovery order.
    std::vector<int> large_component_ids() const;
    bool connected() const { return n_components() == 1; }
};

// Builds a validated graph from a deduplicated edge list (0-based indices).
AdjacencyGraph make_graph(int n_areas, std::vector<std::pair<int, int>> edges);

// Rectangular lattice with rook adjacency; areas numbered row-major.
AdjacencyGraph make_lattice_graph(int rows, int cols);

// Parses either of the two accepted graph formats (auto-detected):
//   - node list: first line n, then "<node-id> <num-neighbors> <ids...>"
//     per node, 1-based, symmetric listing required;
//   - edge CSV with header "from,to", 1-based, each edge in any direction.
AdjacencyGraph parse_graph(std::istream& in);
AdjacencyGraph parse_graph_file(const std::string& path);

// Node-list rendering of the graph (inverse of the first format).
std::string format_graph(const AdjacencyGraph& g);

} // namespace vpmap
