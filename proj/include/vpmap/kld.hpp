#pragma once

#include <optional>
#include <vector>

#include "vpmap/interaction.hpp"
#include "vpmap/structure.hpp"

namespace vpmap {

// Covariance of the combined main effects on the interaction grid,
//   (1-phi) (1 (x) I) M1 (1 (x) I)' + phi (I (x) 1) M2 (I (x) 1)',
// where M1, M2 are the pseudo-inverses of the scaled temporal and spatial
// structures, optionally mixed with identities by (psi1, psi2) when iid
// main effects are included.
struct MainEffectsCovariance {
    Eigen::MatrixXd matrix;
    double phi = 0.5;
    std::optional<std::pair<double, double>> psi; // (psi1, psi2) when iid
    bool includes_iid = false;
};

MainEffectsCovariance main_effects_covariance(
    const StructureMatrix& r1_scaled, const StructureMatrix& r2_scaled,
    double phi, std::optional<std::pair<double, double>> iid_psi = {});

// KL divergence between zero-mean singular Gaussians sharing a support,
// computed with the standard full-rank formula in an orthonormal basis of
// the support of sigma0. Zero iff the matrices agree on the support.
double singular_gaussian_kld(const Eigen::MatrixXd& sigma1,
                             const Eigen::MatrixXd& sigma0);

// Distance-from-base-model curve for one interaction configuration. The
// mixture covariance is Sigma(g) = (1-g) Q0inv + g Q1inv, the base sits at
// g = gamma0, and the distance is d(g) = sqrt(2 KLD(Sigma(g) || Sigma(gamma0))).
// The sqrt(gamma) law predicts d(g)/sqrt(g) constant at sqrt(m/gamma0),
// where m counts joint-support directions invisible to the main effects.
struct KldReport {
    InteractionType type = InteractionType::I;
    int n1 = 0, n2 = 0;
    int temporal_order = 1;
    bool with_iid = false;
    double phi = 0.5;
    double gamma0 = 1e-6;
    std::vector<double> grid;
    std::vector<double> distances;
    std::vector<double> ratios;        // d(g)/sqrt(g), regime points only
    double ratio_mean = 0.0;
    double ratio_rel_spread = 0.0;     // (max-min)/mean over regime points
    double dominant_constant = 0.0;    // fitted: mean ratio
    double expected_constant = 0.0;    // sqrt(m/gamma0)
    int m_spectral = 0;                // rank(Q0inv+Q1inv) - rank(Q0inv)
    int interaction_rank_value = 0;    // rank of the interaction structure
    bool m_differs_from_rank = false;  // noted when m != rank(R_I)
    bool spread_ok = false;
    bool constant_ok = false;
    bool pass() const { return spread_ok && constant_ok; }
};

KldReport distance_curve(InteractionType type, const StructureMatrix& r1_scaled,
                         const StructureMatrix& r2_scaled, double phi,
                         std::optional<std::pair<double, double>> iid_psi,
                         double gamma0, const std::vector<double>& grid);

struct VerifyConfig {
    InteractionType type = InteractionType::IV;
    int n1 = 4;
    int n2 = 4;
    int temporal_order = 1;
    double phi = 0.5;
    std::optional<std::pair<double, double>> iid_psi;
    AdjacencyGraph graph; // empty -> path graph on n2 nodes
};

struct VerifyResult {
    std::vector<KldReport> reports;
    bool pass = false;
};

// Runs distance_curve for every configuration with gamma0 = 1e-6 and grid
// {0.1, ..., 0.9}; passes iff every report has relative spread < 1e-3 and
// fitted constant within 2% of the spectral-count prediction.
VerifyResult verify_result1(const std::vector<VerifyConfig>& configs);

// Default verification set: all four types, n1 = n2 = 4, rw1 and rw2,
// with and without iid main effects.
std::vector<VerifyConfig> default_verify_configs();

} // namespace vpmap
