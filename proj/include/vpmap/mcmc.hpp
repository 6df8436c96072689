#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vpmap/model.hpp"
#include "vpmap/priors.hpp"

namespace vpmap {

struct McmcConfig {
    long n_iterations = 20000;
    long burn_in = 5000;
    long thin = 5;
    int n_chains = 1;
    std::uint64_t seed = 1;
    double target_accept_joint = 0.25;  // joint hyperparameter move
    double target_accept_scalar = 0.44; // intercept moves
    double alpha_prior_sd = 10.0;
    bool store_latent = false;
    bool store_pointwise = true;
    int jobs = 1; // worker slots for parallel chains; output is
                  // independent of this value

    void validate() const;
};

// Retained draws from all chains, stacked in chain order. Hyperparameters
// are stored on their natural scales; latent draws are optional.
struct PosteriorDraws {
    std::vector<std::string> hyper_names; // tau, gamma, phi [, psi1, psi2]
    Eigen::MatrixXd hyper;                // retained x hyper
    Eigen::MatrixXd alpha;                // retained x n_alpha
    Eigen::VectorXd loglik;               // total log likelihood per draw
    Eigen::MatrixXd pointwise;            // retained x observed cells (optional)
    std::vector<int> pointwise_cells;     // cell index per pointwise column
    Eigen::MatrixXd latent;               // retained x latent dim (optional)
    std::vector<std::string> latent_names;
    Eigen::VectorXd eta_mean;             // posterior mean linear predictor
    std::vector<int> chain;               // chain id per retained row

    double joint_accept_rate = 0.0;
    std::vector<double> alpha_accept_rates;
    double max_constraint_residual = 0.0;
    long ess_contraction_warnings = 0;

    long n_retained() const { return hyper.rows(); }
    int hyper_index(const std::string& name) const;
};

// One elliptical slice step for a latent block with fixed Gaussian prior
// given by its spectral decomposition. Rejection-free; the output stays in
// the prior's row space exactly. If the slice shrinks more than
// max_contractions times the current state is kept and the flag is set.
struct EssResult {
    Eigen::VectorXd block;
    double loglik = 0.0;
    bool hit_max_contractions = false;
};

EssResult ess_latent_update(
    const Eigen::VectorXd& block, const SpectralDecomposition& prior_spec,
    const std::function<double(const Eigen::VectorXd&)>& loglik, RngStream& rng,
    std::optional<double> current_loglik = {}, int max_contractions = 100);

// Runs the VP sampler: elliptical slice updates for every latent block and
// an adaptive joint random-walk Metropolis step on the transformed
// hyperparameters (adaptation frozen after burn-in). Deterministic given
// (data, spec, priors, cfg).
PosteriorDraws run_mcmc(const Dataset& data, const ModelSpec& spec,
                        const PriorSpec& priors, const McmcConfig& cfg);

// Two-level variance partitioning table: interaction vs main effects,
// space vs time within main, iid vs structured within each main effect.
struct VpTableRow {
    std::string level1;
    std::string level2;
    std::string estimator;
    double mean = 0.0;
    double lo = 0.0; // 2.5% quantile
    double hi = 0.0; // 97.5% quantile
};

struct VpTable {
    std::vector<VpTableRow> rows;
};

VpTable vp_table(const PosteriorDraws& draws);

struct InformationCriteria {
    double deviance_mean = 0.0;    // mean of -2 loglik over draws
    double deviance_at_mean = 0.0; // -2 loglik at the posterior mean eta
    double p_d = 0.0;
    double dic = 0.0;
    double lppd = 0.0;
    double p_waic = 0.0;
    double waic = 0.0;
    bool unstable = false; // fewer than 100 retained draws
};

InformationCriteria dic_waic(const PosteriorDraws& draws, const Dataset& data,
                             const ModelSpec& spec);

// Split-half potential scale reduction factor per hyperparameter.
std::map<std::string, double> split_rhat(const PosteriorDraws& draws);

// Empirical quantile with type-7 interpolation (tables are reproducible
// bit for bit under this convention).
double quantile_type7(std::vector<double> values, double p);

// Kolmogorov-Smirnov distance between draws and a reference cdf.
double ks_distance(std::vector<double> draws,
                   const std::function<double(double)>& cdf);

} // namespace vpmap
