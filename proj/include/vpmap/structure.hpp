#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vpmap/graph.hpp"
#include "vpmap/rng.hpp"

namespace vpmap {

// Relative eigenvalue threshold separating the null space from the row space.
// The null eigenvalues of RW/ICAR structures are exact zeros up to round-off
// and the smallest nonzero eigenvalue sits far above this at desk scale.
inline constexpr double kRankTol = 1e-8;

enum class StructureKind { rw1, rw2, icar, kronecker, identity };

// Symmetric positive semi-definite structure matrix of an intrinsic GMRF.
// For icar kind, `components` carries the graph partition so that scaling
// can treat disconnected graphs per component.
struct StructureMatrix {
    Eigen::MatrixXd entries;
    StructureKind kind = StructureKind::identity;
    bool scaled = false;
    std::vector<std::vector<int>> components;

    int order() const { return static_cast<int>(entries.rows()); }
};

// Eigendecomposition with eigenvalues sorted nonincreasing; the trailing
// (order - rank) columns of `eigenvectors` span the null space.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int rank = 0;

    int order() const { return static_cast<int>(eigenvalues.size()); }
    int null_dim() const { return order() - rank; }
    Eigen::Ref<const Eigen::MatrixXd> range_basis() const {
        return eigenvectors.leftCols(rank);
    }
    Eigen::Ref<const Eigen::MatrixXd> null_basis() const {
        return eigenvectors.rightCols(null_dim());
    }
};

// Random-walk structure matrix of the given order (1 or 2), unscaled.
// Order 1 is the path-graph Laplacian; order 2 is D'D with D the
// (n-2) x n second-difference matrix.
StructureMatrix rw_structure(int n, int order);

// ICAR structure: diagonal holds neighbor counts, -1 between neighbors.
StructureMatrix icar_structure(const AdjacencyGraph& g);

// Identity structure (iid effects); generalized variance is already 1.
StructureMatrix identity_structure(int n);

// Dense symmetric eigendecomposition with rank detection at kRankTol
// relative to the largest eigenvalue.
SpectralDecomposition spectral(const Eigen::MatrixXd& symmetric);
SpectralDecomposition spectral(const StructureMatrix& R);

// Moore-Penrose pseudo-inverse assembled from the decomposition.
Eigen::MatrixXd pseudo_inverse(const SpectralDecomposition& sd);

// Geometric mean of the diagonal of the pseudo-inverse.
double generalized_variance(const StructureMatrix& R);
double generalized_variance(const Eigen::MatrixXd& symmetric);

// Multiplies R by its generalized variance so the result has generalized
// variance one. ICAR structures on disconnected graphs are scaled per
// connected component of size > 1; singleton components keep zero rows
// (their structured effect is pinned at zero).
StructureMatrix scale_structure(const StructureMatrix& R);

// Zero-mean draw confined to the row space: sum over positive eigenvalues
// of (z_i / sqrt(lambda_i)) v_i, z_i iid standard normal. Null-space
// constraints therefore hold exactly up to round-off.
Eigen::VectorXd sample_igmrf(const SpectralDecomposition& sd, RngStream& rng);

// Log density of the improper GMRF evaluated on the row space:
//   -(rank/2) log(2 pi) + (1/2) sum log lambda_i - (1/2) x'Rx.
// Rejects x with a null-space component above tolerance.
double igmrf_logdensity(const Eigen::VectorXd& x, const SpectralDecomposition& sd,
                        double constraint_tol = 1e-8);

// Kronecker product, row-major blocks: (A (x) B)[iA*nB+iB, jA*nB+jB] = A*B.
Eigen::MatrixXd kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

} // namespace vpmap
