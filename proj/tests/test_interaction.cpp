#include <doctest.h>

#include "test_util.hpp"
#include "vpmap/errors.hpp"
#include "vpmap/interaction.hpp"

using namespace vpmap;
using testutil::path_graph;

TEST_CASE("constraint rows, 2x2 grid") {
    SUBCASE("type II: one sum-to-zero row per area") {
        const Eigen::MatrixXd c = constraint_rows(InteractionType::II, 2, 2);
        Eigen::MatrixXd expect(2, 4);
        expect << 1, 1, 0, 0, 0, 0, 1, 1;
        CHECK((c - expect).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("type III: one sum-to-zero row per time point") {
        const Eigen::MatrixXd c = constraint_rows(InteractionType::III, 2, 2);
        Eigen::MatrixXd expect(2, 4);
        expect << 1, 0, 1, 0, 0, 1, 0, 1;
        CHECK((c - expect).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("type IV stacks both with one redundancy") {
        const Eigen::MatrixXd c = constraint_rows(InteractionType::IV, 2, 2);
        CHECK(c.rows() == 4);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-10) ++rank;
        CHECK(rank == 3);
    }
    SUBCASE("type I has none") {
        CHECK(constraint_rows(InteractionType::I, 2, 2).rows() == 0);
    }
}

TEST_CASE("closed-form interaction ranks") {
    CHECK(interaction_rank(InteractionType::IV, 21, 88, 1, 1) == 1740);
    CHECK(interaction_rank(InteractionType::I, 3, 5, 1, 1) == 15);
    CHECK(interaction_rank(InteractionType::II, 4, 3, 1, 1) == 9);
    CHECK(interaction_rank(InteractionType::III, 4, 4, 1, 2) == 8);
}

TEST_CASE("build_interaction: structures, ranks, and constraints") {
    const StructureMatrix r1_rw1_4 = scale_structure(rw_structure(4, 1));
    const StructureMatrix r1_rw2_5 = scale_structure(rw_structure(5, 2));
    const StructureMatrix r2_path3 = scale_structure(icar_structure(path_graph(3)));
    const StructureMatrix r2_path4 = scale_structure(icar_structure(path_graph(4)));

    SUBCASE("type IV with rw2(5) and a connected 4-area graph has rank 9") {
        const InteractionModel m =
            build_interaction(InteractionType::IV, r1_rw2_5, r2_path4);
        CHECK(m.theoretical_rank == 9); // (4-1)(5-2)
        CHECK(m.spectral.rank == 9);
    }

    SUBCASE("type I is the identity with no constraints") {
        const StructureMatrix r1 = scale_structure(rw_structure(3, 1));
        const InteractionModel m =
            build_interaction(InteractionType::I, r1, r2_path3);
        CHECK(m.structure.entries.isIdentity(1e-14));
        CHECK(m.theoretical_rank == 9);
        CHECK(m.constraints.rows() == 0);
    }

    SUBCASE("type II numeric rank agrees with the closed form") {
        const InteractionModel m =
            build_interaction(InteractionType::II, r1_rw1_4, r2_path3);
        CHECK(m.theoretical_rank == 9); // 3 * (4 - 1)
        CHECK(m.spectral.rank == 9);
    }

    SUBCASE("unscaled factors are rejected") {
        CHECK_THROWS_AS(build_interaction(InteractionType::IV,
                                          rw_structure(4, 1), r2_path3),
                        VpError);
    }

    SUBCASE("dimension cap") {
        try {
            build_interaction(InteractionType::I, r1_rw1_4, r2_path4, 10);
            FAIL("expected size error");
        } catch (const VpError& e) {
            CHECK(e.code() == ErrorCode::size);
        }
    }

    SUBCASE("constraint rows are annihilated by the structure") {
        for (InteractionType t : {InteractionType::II, InteractionType::III,
                                  InteractionType::IV}) {
            const InteractionModel m = build_interaction(t, r1_rw1_4, r2_path4);
            if (m.constraints.rows() == 0) continue;
            const Eigen::MatrixXd prod =
                m.structure.entries * m.constraints.transpose();
            CHECK(prod.cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("numeric rank equals the closed form over random configurations") {
    struct Cfg {
        int n1, n2, order;
        unsigned seed;
    };
    const Cfg cfgs[] = {
        {4, 5, 1, 1}, {5, 4, 2, 2}, {6, 5, 1, 3}, {4, 6, 2, 4}, {5, 5, 1, 5}};
    for (const Cfg& c : cfgs) {
        const StructureMatrix r1 = scale_structure(rw_structure(c.n1, c.order));
        const AdjacencyGraph g = testutil::random_connected_graph(c.n2, c.seed);
        const StructureMatrix r2 = scale_structure(icar_structure(g));
        for (InteractionType t : {InteractionType::I, InteractionType::II,
                                  InteractionType::III, InteractionType::IV}) {
            const InteractionModel m = build_interaction(t, r1, r2);
            CHECK(m.spectral.rank ==
                  interaction_rank(t, c.n1, c.n2, c.order, g.n_components()));
        }
    }
}

TEST_CASE("component-corrected rank on a disconnected graph") {
    // two disjoint paths: 3 + 2 areas
    const AdjacencyGraph g = make_graph(5, {{0, 1}, {1, 2}, {3, 4}});
    const StructureMatrix r1 = scale_structure(rw_structure(4, 1));
    const StructureMatrix r2 = scale_structure(icar_structure(g));
    for (InteractionType t : {InteractionType::III, InteractionType::IV}) {
        const InteractionModel m = build_interaction(t, r1, r2);
        CHECK(m.spectral.rank == interaction_rank(t, 4, 5, 1, 2));
    }
}

TEST_CASE("interaction prior draws satisfy the table constraints") {
    RngStream rng(17);
    const StructureMatrix r1 = scale_structure(rw_structure(4, 1));
    const StructureMatrix r2 = scale_structure(icar_structure(path_graph(4)));
    for (InteractionType t : {InteractionType::II, InteractionType::III,
                              InteractionType::IV}) {
        const InteractionModel m = build_interaction(t, r1, r2);
        for (int k = 0; k < 5; ++k) {
            const Eigen::VectorXd d = sample_igmrf(m.spectral, rng);
            CHECK((m.constraints * d).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("interaction type string round trip") {
    for (InteractionType t : {InteractionType::I, InteractionType::II,
                              InteractionType::III, InteractionType::IV})
        CHECK(interaction_type_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(interaction_type_from_string("V"), VpError);
}
