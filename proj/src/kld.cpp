#include "vpmap/kld.hpp"

#include <cmath>
#include <string>

#include "vpmap/errors.hpp"

namespace vpmap {

MainEffectsCovariance main_effects_covariance(
    const StructureMatrix& r1_scaled, const StructureMatrix& r2_scaled,
    double phi, std::optional<std::pair<double, double>> iid_psi) {
    if (!(phi >= 0.0 && phi <= 1.0))
        fail(ErrorCode::domain, "phi must lie in [0,1]");
    const int n1 = r1_scaled.order();
    const int n2 = r2_scaled.order();

    Eigen::MatrixXd m1 = pseudo_inverse(spectral(r1_scaled));
    Eigen::MatrixXd m2 = pseudo_inverse(spectral(r2_scaled));
    if (iid_psi) {
        const auto [psi1, psi2] = *iid_psi;
        if (!(psi1 >= 0.0 && psi1 <= 1.0 && psi2 >= 0.0 && psi2 <= 1.0))
            fail(ErrorCode::domain, "psi values must lie in [0,1]");
        m1 = (1.0 - psi1) * m1 + psi1 * Eigen::MatrixXd::Identity(n1, n1);
        m2 = (1.0 - psi2) * m2 + psi2 * Eigen::MatrixXd::Identity(n2, n2);
    }

    // (1 (x) I) M1 (1 (x) I)' tiles M1 over every area pair; the spatial
    // term broadcasts M2 entries over constant time blocks.
    MainEffectsCovariance out;
    out.phi = phi;
    out.psi = iid_psi;
    out.includes_iid = iid_psi.has_value();
    out.matrix = Eigen::MatrixXd::Zero(n1 * n2, n1 * n2);
    for (int j = 0; j < n2; ++j)
        for (int jp = 0; jp < n2; ++jp) {
            auto block = out.matrix.block(j * n1, jp * n1, n1, n1);
            block = (1.0 - phi) * m1;
            if (m2(j, jp) != 0.0)
                block += phi * m2(j, jp) * Eigen::MatrixXd::Ones(n1, n1);
        }
    return out;
}

double singular_gaussian_kld(const Eigen::MatrixXd& sigma1,
                             const Eigen::MatrixXd& sigma0) {
    if (sigma1.rows() != sigma0.rows() || sigma1.cols() != sigma0.cols())
        fail(ErrorCode::validation, "singular_gaussian_kld: dimension mismatch");

    const SpectralDecomposition sd0 = spectral(sigma0);
    const int k = sd0.rank;
    if (k == 0)
        fail(ErrorCode::degenerate_structure,
             "singular_gaussian_kld: sigma0 is zero");

    // sigma1 must live on the same support: no mass off sigma0's range and
    // full rank within it.
    if (sd0.null_dim() > 0) {
        const Eigen::MatrixXd off =
            sd0.null_basis().transpose() * sigma1 * sd0.null_basis();
        const double scale = std::max(sigma1.cwiseAbs().maxCoeff(), 1e-300);
        if (off.cwiseAbs().maxCoeff() > 1e-8 * scale)
            fail(ErrorCode::support_mismatch,
                 "singular_gaussian_kld: sigma1 has mass outside the support "
                 "of sigma0");
    }
    const Eigen::MatrixXd w1 =
        sd0.range_basis().transpose() * sigma1 * sd0.range_basis();
    const SpectralDecomposition sw1 = spectral(w1);
    if (sw1.rank != k)
        fail(ErrorCode::support_mismatch,
             "singular_gaussian_kld: sigma1 is rank deficient on the support "
             "of sigma0 (" + std::to_string(sw1.rank) + " < " +
                 std::to_string(k) + ")");

    double trace_term = 0.0, logdet0 = 0.0, logdet1 = 0.0;
    for (int i = 0; i < k; ++i) {
        trace_term += w1(i, i) / sd0.eigenvalues(i);
        logdet0 += std::log(sd0.eigenvalues(i));
        logdet1 += std::log(sw1.eigenvalues(i));
    }
    const double kld = 0.5 * (trace_term - k + logdet0 - logdet1);
    if (kld < -1e-9)
        fail(ErrorCode::numerical,
             "singular_gaussian_kld: negative divergence " + std::to_string(kld));
    return std::max(kld, 0.0);
}

namespace {

Eigen::MatrixXd interaction_pinv(InteractionType type,
                                 const StructureMatrix& r1_scaled,
                                 const StructureMatrix& r2_scaled) {
    const InteractionModel m = build_interaction(type, r1_scaled, r2_scaled);
    return pseudo_inverse(m.spectral);
}

int rank_of(const Eigen::MatrixXd& m) { return spectral(m).rank; }

} // namespace

KldReport distance_curve(InteractionType type, const StructureMatrix& r1_scaled,
                         const StructureMatrix& r2_scaled, double phi,
                         std::optional<std::pair<double, double>> iid_psi,
                         double gamma0, const std::vector<double>& grid) {
    if (!(gamma0 > 0.0 && gamma0 <= 1e-4))
        fail(ErrorCode::domain,
             "distance_curve: gamma0 must lie in (0, 1e-4], got " +
                 std::to_string(gamma0));

    KldReport rep;
    rep.type = type;
    rep.n1 = r1_scaled.order();
    rep.n2 = r2_scaled.order();
    rep.temporal_order = r1_scaled.kind == StructureKind::rw2 ? 2 : 1;
    rep.with_iid = iid_psi.has_value();
    rep.phi = phi;
    rep.gamma0 = gamma0;

    const Eigen::MatrixXd q0inv =
        main_effects_covariance(r1_scaled, r2_scaled, phi, iid_psi).matrix;
    const InteractionModel inter = build_interaction(type, r1_scaled, r2_scaled);
    const Eigen::MatrixXd q1inv = pseudo_inverse(inter.spectral);
    rep.interaction_rank_value = inter.theoretical_rank;

    rep.m_spectral = rank_of(q0inv + q1inv) - rank_of(q0inv);
    rep.m_differs_from_rank = rep.m_spectral != rep.interaction_rank_value;
    rep.expected_constant = std::sqrt(rep.m_spectral / gamma0);

    const Eigen::MatrixXd sigma0 = (1.0 - gamma0) * q0inv + gamma0 * q1inv;
    double rmin = 0.0, rmax = 0.0, rsum = 0.0;
    int nregime = 0;
    for (double g : grid) {
        if (!(g > 0.0 && g < 1.0))
            fail(ErrorCode::domain, "distance_curve: grid values must lie in (0,1)");
        const Eigen::MatrixXd sigma1 = (1.0 - g) * q0inv + g * q1inv;
        const double d = std::sqrt(2.0 * singular_gaussian_kld(sigma1, sigma0));
        rep.grid.push_back(g);
        rep.distances.push_back(d);
        // The sqrt(gamma) regime needs g well above the base; points at or
        // below 100*gamma0 (e.g. gamma0 itself, where d = 0) are reported
        // but excluded from the ratio statistics.
        if (g >= 100.0 * gamma0) {
            const double ratio = d / std::sqrt(g);
            rep.ratios.push_back(ratio);
            if (nregime == 0) {
                rmin = rmax = ratio;
            } else {
                rmin = std::min(rmin, ratio);
                rmax = std::max(rmax, ratio);
            }
            rsum += ratio;
            ++nregime;
        }
    }
    if (nregime > 0) {
        rep.ratio_mean = rsum / nregime;
        rep.ratio_rel_spread = (rmax - rmin) / rep.ratio_mean;
        rep.dominant_constant = rep.ratio_mean;
    }
    rep.spread_ok = nregime > 0 && rep.ratio_rel_spread < 1e-3;
    rep.constant_ok =
        nregime > 0 &&
        std::abs(rep.dominant_constant / rep.expected_constant - 1.0) < 0.02;
    return rep;
}

std::vector<VerifyConfig> default_verify_configs() {
    std::vector<VerifyConfig> cfgs;
    for (InteractionType type : {InteractionType::I, InteractionType::II,
                                 InteractionType::III, InteractionType::IV})
        for (int order : {1, 2})
            for (bool iid : {false, true}) {
                VerifyConfig c;
                c.type = type;
                c.temporal_order = order;
                if (iid) c.iid_psi = {0.3, 0.6};
                cfgs.push_back(c);
            }
    return cfgs;
}

VerifyResult verify_result1(const std::vector<VerifyConfig>& configs) {
    VerifyResult out;
    out.pass = true;
    std::vector<double> grid;
    for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
    for (const auto& cfg : configs) {
        AdjacencyGraph g = cfg.graph;
        if (g.n_areas == 0) {
            std::vector<std::pair<int, int>> edges;
            for (int j = 0; j + 1 < cfg.n2; ++j) edges.emplace_back(j, j + 1);
            g = make_graph(cfg.n2, std::move(edges));
        }
        const StructureMatrix r1 =
            scale_structure(rw_structure(cfg.n1, cfg.temporal_order));
        const StructureMatrix r2 = scale_structure(icar_structure(g));
        KldReport rep = distance_curve(cfg.type, r1, r2, cfg.phi, cfg.iid_psi,
                                       1e-6, grid);
        out.pass = out.pass && rep.pass();
        out.reports.push_back(std::move(rep));
    }
    return out;
}

} // namespace vpmap
