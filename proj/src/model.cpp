#include "vpmap/model.hpp"

#include <cmath>

#include "vpmap/errors.hpp"

namespace vpmap {

std::string to_string(Family f) {
    return f == Family::binomial ? "binomial" : "poisson";
}

Family family_from_string(const std::string& s) {
    if (s == "binomial") return Family::binomial;
    if (s == "poisson") return Family::poisson;
    fail(ErrorCode::validation, "unknown family '" + s + "'");
}

int Dataset::n_observed() const {
    int k = 0;
    for (auto o : observed) k += o != 0;
    return k;
}

int intercept_count(const AdjacencyGraph& g) {
    const int large = static_cast<int>(g.large_component_ids().size());
    return 1 + std::max(0, large - 1);
}

ModelStructures build_structures(const ModelSpec& spec) {
    if (spec.n1 < 3)
        fail(ErrorCode::size, "model needs n1 >= 3 time points");
    if (spec.graph.n_areas != spec.n2)
        fail(ErrorCode::validation,
             "graph has " + std::to_string(spec.graph.n_areas) +
                 " areas but the model declares n2 = " + std::to_string(spec.n2));
    ModelStructures ms;
    ms.r1_scaled = scale_structure(rw_structure(spec.n1, spec.temporal_order));
    ms.r2_scaled = scale_structure(icar_structure(spec.graph));
    ms.sd1 = spectral(ms.r1_scaled);
    ms.sd2 = spectral(ms.r2_scaled);
    ms.interaction =
        build_interaction(spec.interaction_type, ms.r1_scaled, ms.r2_scaled);

    // Intercept layout: global intercept for everyone; the 2nd..K-th size>1
    // components get their own offsets (treatment coding).
    ms.alpha_index.assign(spec.n2, 0);
    const auto large = spec.graph.large_component_ids();
    for (std::size_t k = 1; k < large.size(); ++k)
        for (int area : spec.graph.components[large[k]])
            ms.alpha_index[area] = static_cast<int>(k);
    ms.n_alpha = intercept_count(spec.graph);
    return ms;
}

Eigen::VectorXd linear_predictor(const Hyperparameters& h, const LatentField& x,
                                 const ModelSpec& spec) {
    const int n1 = spec.n1, n2 = spec.n2;
    if (x.beta1.size() != n1 || x.beta2.size() != n2 ||
        x.delta.size() != static_cast<Eigen::Index>(n1) * n2)
        fail(ErrorCode::validation, "linear_predictor: latent dimension mismatch");
    if (spec.include_iid_main &&
        (x.eps1.size() != n1 || x.eps2.size() != n2 || !h.psi1 || !h.psi2))
        fail(ErrorCode::validation,
             "linear_predictor: iid main effects require eps1, eps2, psi1, psi2");
    if (!(h.tau > 0.0) || !(h.gamma > 0.0 && h.gamma < 1.0) ||
        !(h.phi > 0.0 && h.phi < 1.0))
        fail(ErrorCode::domain, "linear_predictor: hyperparameters out of domain");
    if (x.alpha.size() < 1)
        fail(ErrorCode::validation, "linear_predictor: missing intercept");

    const double inv_sd = std::sqrt(1.0 / h.tau);
    const double w_main = std::sqrt(1.0 - h.gamma);
    const double w_int = std::sqrt(h.gamma);
    double w1s = std::sqrt(1.0 - h.phi), w1i = 0.0;
    double w2s = std::sqrt(h.phi), w2i = 0.0;
    if (spec.include_iid_main) {
        w1i = w1s * std::sqrt(*h.psi1);
        w1s *= std::sqrt(1.0 - *h.psi1);
        w2i = w2s * std::sqrt(*h.psi2);
        w2s *= std::sqrt(1.0 - *h.psi2);
    }

    // Component intercept offsets per area (0 when the graph is connected).
    std::vector<int> alpha_index(n2, 0);
    {
        const auto large = spec.graph.large_component_ids();
        for (std::size_t k = 1; k < large.size(); ++k)
            for (int area : spec.graph.components[large[k]])
                alpha_index[area] = static_cast<int>(k);
    }

    Eigen::VectorXd eta(static_cast<Eigen::Index>(n1) * n2);
    for (int j = 0; j < n2; ++j) {
        double base = x.alpha(0);
        if (alpha_index[j] > 0) {
            if (alpha_index[j] >= x.alpha.size())
                fail(ErrorCode::validation,
                     "linear_predictor: too few intercepts for the graph");
            base += x.alpha(alpha_index[j]);
        }
        double spatial = w2s * x.beta2(j);
        if (spec.include_iid_main) spatial += w2i * x.eps2(j);
        for (int i = 0; i < n1; ++i) {
            double temporal = w1s * x.beta1(i);
            if (spec.include_iid_main) temporal += w1i * x.eps1(i);
            const Eigen::Index cell = static_cast<Eigen::Index>(j) * n1 + i;
            eta(cell) = base + inv_sd * (w_main * (temporal + spatial) +
                                         w_int * x.delta(cell));
        }
    }
    return eta;
}

namespace {

double inverse_or_endpoint_error(double variance, const char* name) {
    if (!(variance > 0.0))
        fail(ErrorCode::domain,
             std::string("vp_to_classic: derived variance for ") + name +
                 " is zero (mixing parameter at a boundary)");
    return 1.0 / variance;
}

} // namespace

ClassicPrecisions vp_to_classic(const Hyperparameters& h, const ModelSpec& spec) {
    const double v = 1.0 / h.tau;
    ClassicPrecisions p;
    p.tau12 = inverse_or_endpoint_error(v * h.gamma, "delta");
    const double v_main = v * (1.0 - h.gamma);
    if (spec.include_iid_main) {
        if (!h.psi1 || !h.psi2)
            fail(ErrorCode::validation, "vp_to_classic: psi1/psi2 required");
        p.tau1 = inverse_or_endpoint_error(
            v_main * (1.0 - h.phi) * (1.0 - *h.psi1), "beta1");
        p.tau_eps1 = inverse_or_endpoint_error(
            v_main * (1.0 - h.phi) * *h.psi1, "eps1");
        p.tau2 = inverse_or_endpoint_error(
            v_main * h.phi * (1.0 - *h.psi2), "beta2");
        p.tau_eps2 = inverse_or_endpoint_error(v_main * h.phi * *h.psi2, "eps2");
    } else {
        p.tau1 = inverse_or_endpoint_error(v_main * (1.0 - h.phi), "beta1");
        p.tau2 = inverse_or_endpoint_error(v_main * h.phi, "beta2");
    }
    return p;
}

Hyperparameters classic_to_vp(const ClassicPrecisions& p) {
    if (!(p.tau1 > 0.0 && p.tau2 > 0.0 && p.tau12 > 0.0))
        fail(ErrorCode::domain, "classic_to_vp: precisions must be positive");
    if (p.tau_eps1.has_value() != p.tau_eps2.has_value())
        fail(ErrorCode::validation,
             "classic_to_vp: iid precisions must come as a pair");
    const double v1 = 1.0 / p.tau1;
    const double v2 = 1.0 / p.tau2;
    const double v12 = 1.0 / p.tau12;
    Hyperparameters h;
    if (p.tau_eps1) {
        const double ve1 = 1.0 / *p.tau_eps1;
        const double ve2 = 1.0 / *p.tau_eps2;
        const double vtot = v1 + ve1 + v2 + ve2 + v12;
        h.tau = 1.0 / vtot;
        h.gamma = v12 / vtot;
        h.phi = (v2 + ve2) / (v1 + ve1 + v2 + ve2);
        h.psi1 = ve1 / (v1 + ve1);
        h.psi2 = ve2 / (v2 + ve2);
    } else {
        const double vtot = v1 + v2 + v12;
        h.tau = 1.0 / vtot;
        h.gamma = v12 / vtot;
        h.phi = v2 / (v1 + v2);
    }
    return h;
}

namespace {

// log(1 + exp(eta)) without overflow at either tail.
double log1p_exp(double eta) {
    if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
    return std::log1p(std::exp(eta));
}

double lchoose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace

double cell_loglik(double y, double exposure, double eta, Family family) {
    if (!std::isfinite(eta))
        fail(ErrorCode::numerical, "log_likelihood: non-finite eta");
    if (family == Family::binomial)
        return lchoose(exposure, y) + y * eta - exposure * log1p_exp(eta);
    return y * (std::log(exposure) + eta) - exposure * std::exp(eta) -
           std::lgamma(y + 1.0);
}

double log_likelihood(const Dataset& data, const Eigen::VectorXd& eta,
                      Family family) {
    if (eta.size() != data.n_cells())
        fail(ErrorCode::validation, "log_likelihood: eta dimension mismatch");
    double ll = 0.0;
    for (int c = 0; c < data.n_cells(); ++c) {
        if (!data.observed[c]) continue;
        ll += cell_loglik(data.y(c), data.exposure(c), eta(c), family);
    }
    return ll;
}

LatentField sample_latent_prior(const ModelStructures& ms, const ModelSpec& spec,
                                RngStream& rng) {
    LatentField x;
    x.alpha = Eigen::VectorXd::Zero(ms.n_alpha);
    x.beta1 = sample_igmrf(ms.sd1, rng);
    x.beta2 = sample_igmrf(ms.sd2, rng);
    x.delta = sample_igmrf(ms.interaction.spectral, rng);
    if (spec.include_iid_main) {
        x.eps1.resize(spec.n1);
        for (int i = 0; i < spec.n1; ++i) x.eps1(i) = rng.normal();
        x.eps2.resize(spec.n2);
        for (int j = 0; j < spec.n2; ++j) x.eps2(j) = rng.normal();
    }
    return x;
}

double max_constraint_residual(const LatentField& x, const ModelStructures& ms) {
    double resid = 0.0;
    if (ms.sd1.null_dim() > 0)
        resid = std::max(
            resid,
            (ms.sd1.null_basis().transpose() * x.beta1).cwiseAbs().maxCoeff());
    if (ms.sd2.null_dim() > 0)
        resid = std::max(
            resid,
            (ms.sd2.null_basis().transpose() * x.beta2).cwiseAbs().maxCoeff());
    if (ms.interaction.constraints.rows() > 0)
        resid = std::max(
            resid,
            (ms.interaction.constraints * x.delta).cwiseAbs().maxCoeff());
    return resid;
}

Dataset simulate_dataset(const Hyperparameters& h, const LatentField& effects,
                         const Eigen::VectorXd& pop, const ModelSpec& spec,
                         RngStream& rng) {
    const int n = spec.n1 * spec.n2;
    Eigen::VectorXd exposure(n);
    if (pop.size() == spec.n2) {
        for (int j = 0; j < spec.n2; ++j)
            exposure.segment(static_cast<Eigen::Index>(j) * spec.n1, spec.n1)
                .setConstant(pop(j));
    } else if (pop.size() == n) {
        exposure = pop;
    } else {
        fail(ErrorCode::validation,
             "simulate_dataset: pop must have length n2 or n1*n2");
    }
    if ((exposure.array() <= 0.0).any())
        fail(ErrorCode::validation, "simulate_dataset: exposures must be positive");

    const Eigen::VectorXd eta = linear_predictor(h, effects, spec);
    Dataset d;
    d.n1 = spec.n1;
    d.n2 = spec.n2;
    d.exposure = exposure;
    d.y.resize(n);
    d.observed.assign(n, 1);
    for (int c = 0; c < n; ++c) {
        if (spec.family == Family::binomial) {
            const double p = 1.0 / (1.0 + std::exp(-eta(c)));
            d.y(c) = static_cast<double>(
                rng.binomial(static_cast<long long>(std::llround(exposure(c))), p));
        } else {
            d.y(c) = static_cast<double>(rng.poisson(exposure(c) * std::exp(eta(c))));
        }
    }
    return d;
}

Dataset make_dataset(int n1, int n2, const std::vector<int>& time_idx,
                     const std::vector<int>& area_idx,
                     const std::vector<double>& y,
                     const std::vector<double>& exposure, Family family) {
    if (n1 < 1 || n2 < 1)
        fail(ErrorCode::validation, "make_dataset: dimensions must be positive");
    const std::size_t n_rows = y.size();
    if (time_idx.size() != n_rows || area_idx.size() != n_rows ||
        exposure.size() != n_rows)
        fail(ErrorCode::validation, "make_dataset: column lengths differ");

    Dataset d;
    d.n1 = n1;
    d.n2 = n2;
    d.y = Eigen::VectorXd::Zero(n1 * n2);
    d.exposure = Eigen::VectorXd::Zero(n1 * n2);
    d.observed.assign(static_cast<std::size_t>(n1) * n2, 0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const int i = time_idx[r], j = area_idx[r];
        if (i < 1 || i > n1 || j < 1 || j > n2)
            fail(ErrorCode::validation,
                 "data row " + std::to_string(r + 1) + ": cell (" +
                     std::to_string(i) + "," + std::to_string(j) +
                     ") outside the " + std::to_string(n1) + "x" +
                     std::to_string(n2) + " grid");
        const Eigen::Index cell =
            static_cast<Eigen::Index>(j - 1) * n1 + (i - 1);
        if (d.observed[cell])
            fail(ErrorCode::validation,
                 "data row " + std::to_string(r + 1) + ": duplicate cell (" +
                     std::to_string(i) + "," + std::to_string(j) + ")");
        if (y[r] < 0.0)
            fail(ErrorCode::validation,
                 "data row " + std::to_string(r + 1) + ": negative count");
        if (exposure[r] <= 0.0)
            fail(ErrorCode::validation,
                 "data row " + std::to_string(r + 1) + ": exposure must be positive");
        if (family == Family::binomial && y[r] > exposure[r])
            fail(ErrorCode::validation,
                 "data row " + std::to_string(r + 1) + ": count " +
                     std::to_string(y[r]) + " exceeds exposure " +
                     std::to_string(exposure[r]));
        d.y(cell) = y[r];
        d.exposure(cell) = exposure[r];
        d.observed[cell] = 1;
    }
    return d;
}

} // namespace vpmap
