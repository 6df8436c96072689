#pragma once

#include <optional>

#include "vpmap/rng.hpp"

namespace vpmap {

// Penalized-complexity prior on the interaction mixing proportion gamma:
//   pi(gamma) = theta exp(-theta sqrt(gamma)) / (2 sqrt(gamma) (1 - exp(-theta)))
// on (0,1). theta comes from a tail statement P(gamma < U) = a.
struct GammaPCPrior {
    double theta = 1.0;
    std::optional<std::pair<double, double>> elicitation; // (U, a)
};

// Type-2 Gumbel prior on the total precision tau:
//   pi(tau) = (lambda/2) tau^{-3/2} exp(-lambda tau^{-1/2}),
// the PC prior of an exponential on the standard deviation 1/sqrt(tau),
// elicited from P(1/sqrt(tau) > U) = a via lambda = -log(a)/U.
struct TauPCPrior {
    double lambda = 1.0;
    std::optional<std::pair<double, double>> elicitation; // (U, a)
};

// Priors for the full hyperparameter block. gamma defaults to its PC prior
// but may be a Uniform(0,1); phi, psi1, psi2 are Uniform(0,1).
struct PriorSpec {
    std::optional<GammaPCPrior> gamma_pc; // nullopt = Uniform(0,1)
    TauPCPrior tau;
};

// Solves (1 - exp(-theta sqrt(U))) / (1 - exp(-theta)) = a for theta > 0 by
// bracketed bisection; the left side is monotone in theta. Requires the
// admissibility condition a > sqrt(U).
double solve_theta(double u, double a);

GammaPCPrior elicit_gamma_prior(double u, double a);
TauPCPrior elicit_tau_prior(double u, double a);

double pc_gamma_logpdf(double gamma, const GammaPCPrior& prior);
double pc_gamma_cdf(double gamma, const GammaPCPrior& prior);
double pc_gamma_quantile(double p, const GammaPCPrior& prior);
double pc_gamma_sample(const GammaPCPrior& prior, RngStream& rng);

double pc_tau_logpdf(double tau, const TauPCPrior& prior);
double pc_tau_cdf(double tau, const TauPCPrior& prior);
double pc_tau_quantile(double p, const TauPCPrior& prior);

} // namespace vpmap
