#include "vpmap/graph.hpp"

#include <algorithm>
#include <istream>
#include <fstream>
#include <set>
#include <sstream>

#include "vpmap/errors.hpp"

namespace vpmap {

namespace {

std::vector<std::vector<int>> find_components(int n,
                                              const std::vector<std::vector<int>>& adj) {
    std::vector<int> label(n, -1);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        const int id = static_cast<int>(comps.size());
        std::vector<int> stack{s}, members;
        label[s] = id;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w : adj[v]) {
                if (label[w] < 0) {
                    label[w] = id;
                    stack.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        comps.push_back(std::move(members));
    }
    return comps;
}

} // namespace

int AdjacencyGraph::n_singletons() const {
    int k = 0;
    for (const auto& c : components)
        if (c.size() == 1) ++k;
    return k;
}

std::vector<int> AdjacencyGraph::large_component_ids() const {
    std::vector<int> ids;
    for (int c = 0; c < n_components(); ++c)
        if (components[c].size() > 1) ids.push_back(c);
    return ids;
}

AdjacencyGraph make_graph(int n_areas, std::vector<std::pair<int, int>> edges) {
    if (n_areas <= 0)
        fail(ErrorCode::validation, "graph must have at least one area");
    std::set<std::pair<int, int>> dedup;
    for (auto [a, b] : edges) {
        if (a == b)
            fail(ErrorCode::validation,
                 "self-loop on area " + std::to_string(a + 1));
        if (a < 0 || b < 0 || a >= n_areas || b >= n_areas)
            fail(ErrorCode::validation,
                 "edge (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                     ") references an area outside 1.." + std::to_string(n_areas));
        dedup.insert({std::min(a, b), std::max(a, b)});
    }

    AdjacencyGraph g;
    g.n_areas = n_areas;
    g.edges.assign(dedup.begin(), dedup.end());
    g.neighbor_counts.assign(n_areas, 0);
    std::vector<std::vector<int>> adj(n_areas);
    for (auto [a, b] : g.edges) {
        ++g.neighbor_counts[a];
        ++g.neighbor_counts[b];
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    g.components = find_components(n_areas, adj);
    return g;
}

AdjacencyGraph make_lattice_graph(int rows, int cols) {
    if (rows < 1 || cols < 1)
        fail(ErrorCode::validation, "lattice dimensions must be positive");
    const auto idx = [cols](int r, int c) { return r * cols + c; };
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.emplace_back(idx(r, c), idx(r, c + 1));
            if (r + 1 < rows) edges.emplace_back(idx(r, c), idx(r + 1, c));
        }
    return make_graph(rows * cols, std::move(edges));
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    fail(ErrorCode::parse,
         "graph parse error at line " + std::to_string(line_no) + ": " + what);
}

AdjacencyGraph parse_node_list(std::istream& in) {
    std::string line;
    int line_no = 0;
    int n = -1;
    // directed[a] = set of listed neighbors of a, used for the symmetry check
    std::vector<std::set<int>> directed;
    std::vector<bool> seen;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (n < 0) {
            if (!(ls >> n) || n <= 0)
                parse_fail(line_no, "expected a positive area count");
            directed.resize(n);
            seen.assign(n, false);
            continue;
        }
        int id = 0, deg = 0;
        if (!(ls >> id >> deg))
            parse_fail(line_no, "expected '<node-id> <num-neighbors> <ids...>'");
        if (id < 1 || id > n)
            fail(ErrorCode::validation,
                 "line " + std::to_string(line_no) + ": node id " +
                     std::to_string(id) + " outside 1.." + std::to_string(n));
        if (deg < 0) parse_fail(line_no, "negative neighbor count");
        if (seen[id - 1])
            fail(ErrorCode::validation,
                 "line " + std::to_string(line_no) + ": node " +
                     std::to_string(id) + " listed twice");
        seen[id - 1] = true;
        for (int k = 0; k < deg; ++k) {
            int nb = 0;
            if (!(ls >> nb))
                parse_fail(line_no, "fewer neighbor ids than declared");
            if (nb < 1 || nb > n)
                fail(ErrorCode::validation,
                     "line " + std::to_string(line_no) + ": neighbor id " +
                         std::to_string(nb) + " outside 1.." + std::to_string(n));
            if (nb == id)
                fail(ErrorCode::validation,
                     "line " + std::to_string(line_no) + ": self-loop on node " +
                         std::to_string(id));
            directed[id - 1].insert(nb - 1);
        }
        int extra;
        if (ls >> extra) parse_fail(line_no, "more neighbor ids than declared");
    }
    if (n < 0) fail(ErrorCode::parse, "graph file is empty");
    for (int a = 0; a < n; ++a)
        if (!seen[a])
            fail(ErrorCode::validation,
                 "node " + std::to_string(a + 1) + " has no line");

    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b : directed[a]) {
            if (directed[b].count(a) == 0)
                fail(ErrorCode::validation,
                     "asymmetric neighbor listing: " + std::to_string(a + 1) +
                         " lists " + std::to_string(b + 1) +
                         " but not vice versa");
            if (a < b) edges.emplace_back(a, b);
        }
    return make_graph(n, std::move(edges));
}

AdjacencyGraph parse_edge_csv(std::istream& in) {
    std::string line;
    int line_no = 1; // header already consumed by caller detection
    std::vector<std::pair<int, int>> edges;
    int max_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string fa, fb;
        if (!std::getline(ls, fa, ',') || !std::getline(ls, fb))
            parse_fail(line_no, "expected 'from,to'");
        int a = 0, b = 0;
        try {
            a = std::stoi(fa);
            b = std::stoi(fb);
        } catch (const std::exception&) {
            parse_fail(line_no, "non-integer area id");
        }
        if (a < 1 || b < 1)
            fail(ErrorCode::validation,
                 "line " + std::to_string(line_no) + ": area ids are 1-based");
        max_id = std::max({max_id, a, b});
        edges.emplace_back(a - 1, b - 1);
    }
    if (edges.empty()) fail(ErrorCode::validation, "edge CSV lists no edges");
    return make_graph(max_id, std::move(edges));
}

} // namespace

AdjacencyGraph parse_graph(std::istream& in) {
    // Peek the first non-blank line to pick the format.
    std::string first;
    std::streampos start = in.tellg();
    while (std::getline(in, first)) {
        if (first.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    if (first.find("from") != std::string::npos &&
        first.find("to") != std::string::npos) {
        return parse_edge_csv(in);
    }
    in.clear();
    in.seekg(start);
    return parse_node_list(in);
}

AdjacencyGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open graph file: " + path);
    return parse_graph(in);
}

std::string format_graph(const AdjacencyGraph& g) {
    std::vector<std::vector<int>> adj(g.n_areas);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::ostringstream out;
    out << g.n_areas << "\n";
    for (int a = 0; a < g.n_areas; ++a) {
        std::sort(adj[a].begin(), adj[a].end());
        out << (a + 1) << " " << adj[a].size();
        for (int b : adj[a]) out << " " << (b + 1);
        out << "\n";
    }
    return out.str();
}

} // namespace vpmap
