#pragma once

#include <optional>
#include <string>

#include "vpmap/graph.hpp"
#include "vpmap/interaction.hpp"
#include "vpmap/structure.hpp"

namespace vpmap {

enum class Family { binomial, poisson };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Model shape: dimensions, likelihood family, temporal smoothing order,
// interaction type, and whether the main effects carry iid companions.
struct ModelSpec {
    Family family = Family::binomial;
    int temporal_order = 1;
    InteractionType interaction_type = InteractionType::IV;
    bool include_iid_main = false;
    int n1 = 0;
    int n2 = 0;
    AdjacencyGraph graph;
};

// Total precision tau plus the mixing proportions. gamma splits total
// variance between interaction and main effects, phi splits the main
// effects between space and time, psi1/psi2 split each main effect between
// iid and structured parts (present only with iid main effects).
struct Hyperparameters {
    double tau = 1.0;
    double gamma = 0.5;
    double phi = 0.5;
    std::optional<double> psi1;
    std::optional<double> psi2;
};

// Latent effects. alpha(0) is the global intercept; with a disconnected
// spatial graph, alpha(k) for k >= 1 holds the offset of the k-th extra
// size>1 component (the first one is absorbed into the global intercept,
// singleton areas use the global intercept alone). delta is laid out
// time-fastest: cell (i, j) at index j*n1 + i.
struct LatentField {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta1;
    Eigen::VectorXd beta2;
    Eigen::VectorXd delta;
    Eigen::VectorXd eps1; // empty unless iid main effects
    Eigen::VectorXd eps2;
};

// Complete (i, j) grid of counts and exposures, time-fastest. Cells without
// an observation are flagged and contribute nothing to the likelihood.
struct Dataset {
    int n1 = 0;
    int n2 = 0;
    Eigen::VectorXd y;
    Eigen::VectorXd exposure;
    std::vector<std::uint8_t> observed;

    int n_cells() const { return n1 * n2; }
    int n_observed() const;
};

// Precision parameters of the classic parametrization, relative to scaled
// structures: tau1/tau2 for the structured main effects, tau12 for the
// interaction, tau_eps1/tau_eps2 for the iid main effects when present.
struct ClassicPrecisions {
    double tau1 = 1.0;
    double tau2 = 1.0;
    double tau12 = 1.0;
    std::optional<double> tau_eps1;
    std::optional<double> tau_eps2;
};

// Scaled structures, spectral decompositions, and intercept layout shared
// by the likelihood evaluations, the prior samplers, and the MCMC engine.
struct ModelStructures {
    StructureMatrix r1_scaled;
    StructureMatrix r2_scaled;
    SpectralDecomposition sd1;
    SpectralDecomposition sd2;
    InteractionModel interaction;
    std::vector<int> alpha_index; // per area: 0 = global only, k>=1 = alpha(k)
    int n_alpha = 1;
};

ModelStructures build_structures(const ModelSpec& spec);

// Number of intercept parameters implied by the spatial graph.
int intercept_count(const AdjacencyGraph& g);

// eta_{ij} = alpha(+component offset) + sqrt(1/tau) [ sqrt(1-gamma) (
//   sqrt(1-phi)(sqrt(1-psi1) beta1_i + sqrt(psi1) eps1_i)
// + sqrt(phi)  (sqrt(1-psi2) beta2_j + sqrt(psi2) eps2_j) )
// + sqrt(gamma) delta_{ij} ], psi terms dropped without iid main effects.
Eigen::VectorXd linear_predictor(const Hyperparameters& h, const LatentField& x,
                                 const ModelSpec& spec);

ClassicPrecisions vp_to_classic(const Hyperparameters& h, const ModelSpec& spec);
Hyperparameters classic_to_vp(const ClassicPrecisions& p);

// Log likelihood over observed cells. Binomial uses the logistic link with
// the C(exposure, y) constant included; Poisson treats exposure as offset.
double log_likelihood(const Dataset& data, const Eigen::VectorXd& eta,
                      Family family);

// Single-cell contribution, same conventions as log_likelihood.
double cell_loglik(double y, double exposure, double eta, Family family);

// Latent draw from the constrained priors (intercepts zero).
LatentField sample_latent_prior(const ModelStructures& ms, const ModelSpec& spec,
                                RngStream& rng);

// Largest absolute residual over all linear constraints on the latent field.
double max_constraint_residual(const LatentField& x, const ModelStructures& ms);

// Simulates counts at the given effects. pop may have length n2 (per-area,
// replicated over time) or n1*n2 (per cell).
Dataset simulate_dataset(const Hyperparameters& h, const LatentField& effects,
                         const Eigen::VectorXd& pop, const ModelSpec& spec,
                         RngStream& rng);

// Validates and freezes a dataset from parallel index/value arrays
// (1-based time/area indices, any order).
Dataset make_dataset(int n1, int n2, const std::vector<int>& time_idx,
                     const std::vector<int>& area_idx,
                     const std::vector<double>& y,
                     const std::vector<double>& exposure, Family family);

} // namespace vpmap
