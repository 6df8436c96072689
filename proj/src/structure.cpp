#include "vpmap/structure.hpp"

#include <cmath>
#include <string>

#include "vpmap/errors.hpp"

namespace vpmap {

StructureMatrix rw_structure(int n, int order) {
    if (order != 1 && order != 2)
        fail(ErrorCode::validation, "random-walk order must be 1 or 2");
    if (order == 1 && n < 3)
        fail(ErrorCode::size, "rw1 needs n >= 3, got n=" + std::to_string(n));
    if (order == 2 && n < 4)
        fail(ErrorCode::size, "rw2 needs n >= 4, got n=" + std::to_string(n));

    StructureMatrix R;
    R.kind = order == 1 ? StructureKind::rw1 : StructureKind::rw2;
    if (order == 1) {
        R.entries = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) {
            R.entries(i, i) += 1.0;
            R.entries(i + 1, i + 1) += 1.0;
            R.entries(i, i + 1) -= 1.0;
            R.entries(i + 1, i) -= 1.0;
        }
    } else {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n - 2, n);
        for (int r = 0; r < n - 2; ++r) {
            D(r, r) = 1.0;
            D(r, r + 1) = -2.0;
            D(r, r + 2) = 1.0;
        }
        R.entries = D.transpose() * D;
    }
    return R;
}

StructureMatrix icar_structure(const AdjacencyGraph& g) {
    if (g.edges.empty())
        fail(ErrorCode::degenerate_structure,
             "ICAR structure needs at least one edge");
    StructureMatrix R;
    R.kind = StructureKind::icar;
    R.components = g.components;
    R.entries = Eigen::MatrixXd::Zero(g.n_areas, g.n_areas);
    for (int k = 0; k < g.n_areas; ++k)
        R.entries(k, k) = static_cast<double>(g.neighbor_counts[k]);
    for (auto [a, b] : g.edges) {
        R.entries(a, b) = -1.0;
        R.entries(b, a) = -1.0;
    }
    return R;
}

StructureMatrix identity_structure(int n) {
    if (n < 1) fail(ErrorCode::size, "identity structure needs n >= 1");
    StructureMatrix R;
    R.kind = StructureKind::identity;
    R.entries = Eigen::MatrixXd::Identity(n, n);
    R.scaled = true; // generalized variance is already 1
    return R;
}

SpectralDecomposition spectral(const Eigen::MatrixXd& symmetric) {
    const int n = static_cast<int>(symmetric.rows());
    if (n == 0 || symmetric.cols() != n)
        fail(ErrorCode::validation, "spectral: matrix must be square");
    const double scale = std::max(1.0, symmetric.cwiseAbs().maxCoeff());
    if ((symmetric - symmetric.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        fail(ErrorCode::validation, "spectral: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (symmetric + symmetric.transpose()));
    if (es.info() != Eigen::Success)
        fail(ErrorCode::numerical, "spectral: eigendecomposition failed");

    SpectralDecomposition sd;
    sd.eigenvalues = es.eigenvalues().reverse();
    sd.eigenvectors = es.eigenvectors().rowwise().reverse();
    const double lmax = std::max(sd.eigenvalues(0), 0.0);
    if (sd.eigenvalues(n - 1) < -1e-9 * std::max(lmax, 1.0))
        fail(ErrorCode::validation,
             "spectral: matrix is not positive semi-definite "
             "(min eigenvalue " + std::to_string(sd.eigenvalues(n - 1)) + ")");
    const double thr = kRankTol * lmax;
    sd.rank = 0;
    while (sd.rank < n && sd.eigenvalues(sd.rank) > thr) ++sd.rank;
    return sd;
}

SpectralDecomposition spectral(const StructureMatrix& R) {
    return spectral(R.entries);
}

Eigen::MatrixXd pseudo_inverse(const SpectralDecomposition& sd) {
    const auto V = sd.range_basis();
    Eigen::VectorXd inv = sd.eigenvalues.head(sd.rank).cwiseInverse();
    return V * inv.asDiagonal() * V.transpose();
}

namespace {

double gv_from_pinv_diag(const Eigen::VectorXd& diag) {
    const double dmax = diag.maxCoeff();
    double log_sum = 0.0;
    for (int i = 0; i < diag.size(); ++i) {
        if (diag(i) <= 1e-12 * dmax)
            fail(ErrorCode::degenerate_structure,
                 "generalized variance undefined: pseudo-inverse diagonal "
                 "vanishes at index " + std::to_string(i + 1) +
                 " (singleton component)");
        log_sum += std::log(diag(i));
    }
    return std::exp(log_sum / static_cast<double>(diag.size()));
}

} // namespace

double generalized_variance(const Eigen::MatrixXd& symmetric) {
    SpectralDecomposition sd = spectral(symmetric);
    if (sd.rank < 1)
        fail(ErrorCode::degenerate_structure,
             "generalized variance undefined for a zero matrix");
    return gv_from_pinv_diag(pseudo_inverse(sd).diagonal());
}

double generalized_variance(const StructureMatrix& R) {
    return generalized_variance(R.entries);
}

StructureMatrix scale_structure(const StructureMatrix& R) {
    StructureMatrix out = R;
    out.scaled = true;

    const bool per_component =
        R.kind == StructureKind::icar && R.components.size() > 1;
    if (!per_component) {
        out.entries *= generalized_variance(R.entries);
        return out;
    }
    for (const auto& comp : R.components) {
        if (comp.size() <= 1) continue; // structured effect pinned at zero
        const int m = static_cast<int>(comp.size());
        Eigen::MatrixXd block(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                block(a, b) = R.entries(comp[a], comp[b]);
        const double gv = generalized_variance(block);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                out.entries(comp[a], comp[b]) = gv * block(a, b);
    }
    return out;
}

Eigen::VectorXd sample_igmrf(const SpectralDecomposition& sd, RngStream& rng) {
    Eigen::VectorXd coeffs(sd.rank);
    for (int i = 0; i < sd.rank; ++i)
        coeffs(i) = rng.normal() / std::sqrt(sd.eigenvalues(i));
    return sd.range_basis() * coeffs;
}

double igmrf_logdensity(const Eigen::VectorXd& x, const SpectralDecomposition& sd,
                        double constraint_tol) {
    if (x.size() != sd.order())
        fail(ErrorCode::validation, "igmrf_logdensity: dimension mismatch");
    if (sd.null_dim() > 0) {
        const double resid = (sd.null_basis().transpose() * x).cwiseAbs().maxCoeff();
        if (resid > constraint_tol * std::max(1.0, x.norm()))
            fail(ErrorCode::constraint_violation,
                 "igmrf_logdensity: x has a null-space component of size " +
                     std::to_string(resid));
    }
    double log_det = 0.0, quad = 0.0;
    for (int i = 0; i < sd.rank; ++i) {
        const double proj = sd.eigenvectors.col(i).dot(x);
        log_det += std::log(sd.eigenvalues(i));
        quad += sd.eigenvalues(i) * proj * proj;
    }
    constexpr double log_2pi = 1.8378770664093454836;
    return -0.5 * sd.rank * log_2pi + 0.5 * log_det - 0.5 * quad;
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) =
                A(i, j) * B;
    return out;
}

} // namespace vpmap
