#include <doctest.h>

#include <sstream>

#include "test_util.hpp"
#include "vpmap/errors.hpp"
#include "vpmap/graph.hpp"

using namespace vpmap;

TEST_CASE("node-list parsing: 3-node path") {
    std::istringstream in("3\n1 1 2\n2 2 1 3\n3 1 2\n");
    const AdjacencyGraph g = parse_graph(in);
    CHECK(g.n_areas == 3);
    CHECK(g.neighbor_counts == std::vector<int>{1, 2, 1});
    CHECK(g.n_components() == 1);
    CHECK(g.edges.size() == 2);
}

TEST_CASE("components: single edge on 4 nodes leaves two singletons") {
    std::istringstream in("4\n1 1 2\n2 1 1\n3 0\n4 0\n");
    const AdjacencyGraph g = parse_graph(in);
    CHECK(g.n_components() == 3);
    CHECK(g.components[0] == std::vector<int>{0, 1});
    CHECK(g.n_singletons() == 2);
    CHECK(g.large_component_ids() == std::vector<int>{0});
}

TEST_CASE("asymmetric listing is rejected with the offending pair") {
    std::istringstream in("2\n1 1 2\n2 0\n");
    CHECK_THROWS_WITH_AS(parse_graph(in),
                         doctest::Contains("asymmetric"), VpError);
}

TEST_CASE("malformed line reports its line number") {
    std::istringstream in("3\n1 1 2\nnot-a-node\n3 0\n");
    try {
        parse_graph(in);
        FAIL("expected a parse error");
    } catch (const VpError& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("neighbor index outside the declared range") {
    std::istringstream in("3\n1 1 5\n2 0\n3 0\n");
    try {
        parse_graph(in);
        FAIL("expected a validation error");
    } catch (const VpError& e) {
        CHECK(e.code() == ErrorCode::validation);
    }
}

TEST_CASE("self-loop rejected") {
    std::istringstream in("2\n1 1 1\n2 0\n");
    CHECK_THROWS_AS(parse_graph(in), VpError);
}

TEST_CASE("edge CSV format") {
    std::istringstream in("from,to\n1,2\n2,3\n3,2\n");
    const AdjacencyGraph g = parse_graph(in);
    CHECK(g.n_areas == 3);
    CHECK(g.edges.size() == 2); // duplicate direction deduplicated
    CHECK(g.neighbor_counts == std::vector<int>{1, 2, 1});
}

TEST_CASE("lattice graph (rook adjacency)") {
    const AdjacencyGraph g = make_lattice_graph(3, 5);
    CHECK(g.n_areas == 15);
    CHECK(g.connected());
    // interior nodes have 4 neighbors, corners 2
    CHECK(g.neighbor_counts[0] == 2);
    CHECK(g.neighbor_counts[7] == 4);
    // edge count: 3*4 horizontal + 2*5 vertical
    CHECK(g.edges.size() == 22);
}

TEST_CASE("format_graph round-trips through the parser") {
    const AdjacencyGraph g = testutil::random_connected_graph(12, 99);
    std::istringstream in(format_graph(g));
    const AdjacencyGraph g2 = parse_graph(in);
    CHECK(g2.n_areas == g.n_areas);
    CHECK(g2.edges == g.edges);
    CHECK(g2.neighbor_counts == g.neighbor_counts);
}
