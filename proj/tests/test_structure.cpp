#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vpmap/errors.hpp"
#include "vpmap/structure.hpp"

using namespace vpmap;
using testutil::path_graph;

namespace {
const double kGvRw1_3 = std::cbrt(50.0 / 729.0); // diag(Rinv) = (5/9, 2/9, 5/9)
}

TEST_CASE("rw1(3) structure matrix") {
    const StructureMatrix R = rw_structure(3, 1);
    Eigen::MatrixXd expect(3, 3);
    expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK((R.entries - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK(R.kind == StructureKind::rw1);
    CHECK_FALSE(R.scaled);
    // row sums vanish
    CHECK(R.entries.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rw2(4) equals D'D for the second-difference matrix") {
    Eigen::MatrixXd D(2, 4);
    D << 1, -2, 1, 0, 0, 1, -2, 1;
    const Eigen::MatrixXd expect = D.transpose() * D; // direct multiply oracle
    const StructureMatrix R = rw_structure(4, 2);
    CHECK((R.entries - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rw sizes below the minimum are rejected") {
    CHECK_THROWS_AS(rw_structure(2, 1), VpError);
    CHECK_THROWS_AS(rw_structure(3, 2), VpError);
    CHECK_THROWS_AS(rw_structure(5, 3), VpError);
}

TEST_CASE("spectral of rw1(3): eigenvalues 3, 1, 0 and constant null vector") {
    const SpectralDecomposition sd = spectral(rw_structure(3, 1));
    // hand eigensolve of the 3-path Laplacian
    CHECK(sd.eigenvalues(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sd.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(sd.eigenvalues(2)) < 1e-12);
    CHECK(sd.rank == 2);
    const Eigen::VectorXd null_vec = sd.null_basis().col(0);
    CHECK(std::abs(std::abs(null_vec.dot(Eigen::Vector3d::Ones().normalized())) -
                   1.0) < 1e-12);
}

TEST_CASE("spectral of the identity") {
    const SpectralDecomposition sd = spectral(identity_structure(4));
    CHECK(sd.rank == 4);
    CHECK(sd.eigenvalues.minCoeff() == doctest::Approx(1.0));
}

TEST_CASE("rw2(5): two zero eigenvalues, null space = constant + linear") {
    const SpectralDecomposition sd = spectral(rw_structure(5, 2));
    CHECK(sd.rank == 3);
    CHECK(sd.null_dim() == 2);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
    Eigen::VectorXd lin(5);
    lin << 1, 2, 3, 4, 5;
    // both vectors lie in the span of the null basis
    const auto nb = sd.null_basis();
    const Eigen::VectorXd r1 = ones - nb * (nb.transpose() * ones);
    const Eigen::VectorXd r2 = lin - nb * (nb.transpose() * lin);
    CHECK(r1.norm() < 1e-10);
    CHECK(r2.norm() < 1e-10);
}

TEST_CASE("spectral reconstruction and PSD validation") {
    const StructureMatrix R = icar_structure(testutil::random_connected_graph(9, 3));
    const SpectralDecomposition sd = spectral(R);
    const Eigen::MatrixXd rebuilt = sd.eigenvectors *
                                    sd.eigenvalues.asDiagonal() *
                                    sd.eigenvectors.transpose();
    CHECK((rebuilt - R.entries).norm() / R.entries.norm() < 1e-10);

    Eigen::MatrixXd asym(2, 2);
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(spectral(asym), VpError);
    Eigen::MatrixXd negdef = -Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(spectral(negdef), VpError);
}

TEST_CASE("icar on a path equals the rw1 matrix") {
    const StructureMatrix icar = icar_structure(path_graph(3));
    const StructureMatrix rw = rw_structure(3, 1);
    CHECK((icar.entries - rw.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("icar on the 4-cycle") {
    const AdjacencyGraph g =
        make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    const StructureMatrix R = icar_structure(g);
    CHECK(R.entries.diagonal().isApprox(Eigen::Vector4d::Constant(2.0)));
    CHECK(R.entries(0, 1) == -1.0);
    CHECK(R.entries(0, 2) == 0.0);
    // cycle Laplacian eigenvalues 2 - 2cos(2 pi k / 4): {0, 2, 2, 4}
    const SpectralDecomposition sd = spectral(R);
    CHECK(sd.rank == 3);
    CHECK(sd.eigenvalues(0) == doctest::Approx(4.0));
    CHECK(sd.eigenvalues(1) == doctest::Approx(2.0));
}

TEST_CASE("icar rank drops by one per connected component") {
    const AdjacencyGraph g = make_graph(4, {{0, 1}, {2, 3}});
    CHECK(spectral(icar_structure(g)).rank == 2);
}

TEST_CASE("icar requires at least one edge") {
    AdjacencyGraph g;
    g.n_areas = 3;
    g.neighbor_counts = {0, 0, 0};
    g.components = {{0}, {1}, {2}};
    CHECK_THROWS_AS(icar_structure(g), VpError);
}

TEST_CASE("generalized variance of rw1(3)") {
    CHECK(generalized_variance(rw_structure(3, 1)) ==
          doctest::Approx(kGvRw1_3).epsilon(1e-12));
}

TEST_CASE("generalized variance of the identity is 1") {
    for (int n : {2, 5, 17})
        CHECK(generalized_variance(identity_structure(n)) ==
              doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("generalized variance halves when the matrix doubles") {
    const StructureMatrix R = icar_structure(testutil::random_connected_graph(7, 5));
    StructureMatrix R2 = R;
    R2.entries *= 2.0;
    CHECK(generalized_variance(R2) ==
          doctest::Approx(0.5 * generalized_variance(R)).epsilon(1e-12));
}

TEST_CASE("generalized variance rejects singleton components") {
    const AdjacencyGraph g = make_graph(3, {{0, 1}});
    const StructureMatrix R = icar_structure(g);
    try {
        generalized_variance(R);
        FAIL("expected degenerate-structure error");
    } catch (const VpError& e) {
        CHECK(e.code() == ErrorCode::degenerate_structure);
    }
}

TEST_CASE("scale_structure: rw1(3)") {
    const StructureMatrix scaled = scale_structure(rw_structure(3, 1));
    CHECK(scaled.scaled);
    CHECK((scaled.entries - kGvRw1_3 * rw_structure(3, 1).entries)
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    CHECK(generalized_variance(scaled) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scale_structure is a fixed point at generalized variance 1") {
    const StructureMatrix id = identity_structure(6);
    const StructureMatrix scaled = scale_structure(id);
    CHECK((scaled.entries - id.entries).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scale_structure scales disconnected icar per component") {
    // two disjoint 3-node paths
    const AdjacencyGraph g = make_graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
    const StructureMatrix scaled = scale_structure(icar_structure(g));
    const Eigen::MatrixXd block_expect =
        kGvRw1_3 * rw_structure(3, 1).entries;
    CHECK((scaled.entries.block(0, 0, 3, 3) - block_expect).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((scaled.entries.block(3, 3, 3, 3) - block_expect).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK(generalized_variance(scaled) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rank identities for rw and icar structures") {
    for (int n = 3; n <= 30; ++n) {
        CHECK(spectral(rw_structure(n, 1)).rank == n - 1);
        if (n >= 4) CHECK(spectral(rw_structure(n, 2)).rank == n - 2);
    }
    for (unsigned seed = 0; seed < 6; ++seed) {
        const AdjacencyGraph g = testutil::random_connected_graph(
            8 + static_cast<int>(seed) * 3, seed);
        CHECK(spectral(icar_structure(g)).rank == g.n_areas - g.n_components());
    }
}

TEST_CASE("sample_igmrf respects null-space constraints") {
    RngStream rng(42);
    const SpectralDecomposition sd1 = spectral(scale_structure(rw_structure(3, 1)));
    for (int k = 0; k < 10; ++k)
        CHECK(std::abs(sample_igmrf(sd1, rng).sum()) < 1e-12);

    const SpectralDecomposition sd2 = spectral(scale_structure(rw_structure(5, 2)));
    Eigen::VectorXd lin(5);
    lin << 1, 2, 3, 4, 5;
    for (int k = 0; k < 10; ++k) {
        const Eigen::VectorXd x = sample_igmrf(sd2, rng);
        CHECK(std::abs(x.sum()) < 1e-12);
        CHECK(std::abs(lin.dot(x)) < 1e-11);
    }
}

TEST_CASE("sample_igmrf covariance matches the pseudo-inverse") {
    // Monte Carlo vs pseudo-inverse oracle, 1e5 draws, 5% of diagonal scale
    RngStream rng(7);
    const SpectralDecomposition sd = spectral(scale_structure(rw_structure(4, 1)));
    const Eigen::MatrixXd target = pseudo_inverse(sd);
    const int n = 4, draws = 100000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < draws; ++k) {
        const Eigen::VectorXd x = sample_igmrf(sd, rng);
        acc += x * x.transpose();
    }
    acc /= static_cast<double>(draws);
    const double scale = target.diagonal().maxCoeff();
    CHECK(((acc - target).cwiseAbs().maxCoeff() / scale) < 0.05);
}

TEST_CASE("igmrf_logdensity closed forms") {
    const double log_2pi = std::log(2.0 * M_PI);

    SUBCASE("x = 0 leaves only the normalizing constant") {
        const SpectralDecomposition sd =
            spectral(scale_structure(rw_structure(3, 1)));
        double logdet = 0.0;
        for (int i = 0; i < sd.rank; ++i) logdet += std::log(sd.eigenvalues(i));
        CHECK(igmrf_logdensity(Eigen::VectorXd::Zero(3), sd) ==
              doctest::Approx(-0.5 * sd.rank * log_2pi + 0.5 * logdet)
                  .epsilon(1e-12));
    }

    SUBCASE("standard bivariate normal at (1, 0)") {
        const SpectralDecomposition sd = spectral(identity_structure(2));
        Eigen::Vector2d x(1.0, 0.0);
        CHECK(igmrf_logdensity(x, sd) ==
              doctest::Approx(-log_2pi - 0.5).epsilon(1e-13));
    }

    SUBCASE("matches the density in eigencoordinates") {
        // change-of-basis oracle: evaluate the 2-dim Gaussian in the
        // positive eigencoordinates directly
        RngStream rng(5);
        const SpectralDecomposition sd =
            spectral(scale_structure(rw_structure(3, 1)));
        const Eigen::VectorXd x = sample_igmrf(sd, rng);
        double expect = 0.0;
        for (int i = 0; i < sd.rank; ++i) {
            const double c = sd.eigenvectors.col(i).dot(x);
            const double lam = sd.eigenvalues(i);
            expect += -0.5 * log_2pi + 0.5 * std::log(lam) - 0.5 * lam * c * c;
        }
        CHECK(igmrf_logdensity(x, sd) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("null-space component rejected") {
        const SpectralDecomposition sd =
            spectral(scale_structure(rw_structure(3, 1)));
        Eigen::Vector3d bad(1.0, 1.0, 1.0); // pure null direction
        CHECK_THROWS_AS(igmrf_logdensity(bad, sd), VpError);
    }

    SUBCASE("invariant to projecting out a null component first") {
        RngStream rng(11);
        const SpectralDecomposition sd =
            spectral(scale_structure(rw_structure(4, 1)));
        const Eigen::VectorXd x = sample_igmrf(sd, rng);
        Eigen::VectorXd shifted = x + 5.0 * Eigen::VectorXd::Ones(4);
        const auto nb = sd.null_basis();
        const Eigen::VectorXd projected =
            shifted - nb * (nb.transpose() * shifted);
        CHECK(igmrf_logdensity(projected, sd) ==
              doctest::Approx(igmrf_logdensity(x, sd)).epsilon(1e-10));
    }
}

TEST_CASE("structure matrices stay symmetric and nearly PSD") {
    for (unsigned seed = 0; seed < 4; ++seed) {
        const StructureMatrix R = scale_structure(
            icar_structure(testutil::random_connected_graph(10, 100 + seed)));
        CHECK((R.entries - R.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const SpectralDecomposition sd = spectral(R);
        CHECK(sd.eigenvalues(sd.order() - 1) >
              -1e-9 * std::max(sd.eigenvalues(0), 1.0));
    }
}
