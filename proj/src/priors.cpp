#include "vpmap/priors.hpp"

#include <cmath>
#include <string>

#include "vpmap/errors.hpp"

namespace vpmap {

namespace {

// F(theta) = P(gamma < U) under the PC prior with scale theta.
double tail_mass(double theta, double sqrt_u) {
    return std::expm1(-theta * sqrt_u) / std::expm1(-theta);
}

void check_unit_open(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        fail(ErrorCode::domain,
             std::string(name) + " must lie strictly in (0,1), got " +
                 std::to_string(v));
}

} // namespace

double solve_theta(double u, double a) {
    check_unit_open(u, "U");
    check_unit_open(a, "a");
    const double sqrt_u = std::sqrt(u);
    if (!(a > sqrt_u))
        fail(ErrorCode::elicitation,
             "inadmissible PC elicitation: requires a > sqrt(U), got a = " +
                 std::to_string(a) + " <= sqrt(" + std::to_string(u) + ") = " +
                 std::to_string(sqrt_u));

    double lo = 1e-8, hi = 1e4;
    if (tail_mass(lo, sqrt_u) >= a || tail_mass(hi, sqrt_u) <= a)
        fail(ErrorCode::numerical,
             "solve_theta: no bracket in [1e-8, 1e4] for U=" + std::to_string(u) +
                 ", a=" + std::to_string(a));
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double f = tail_mass(mid, sqrt_u);
        if (std::abs(f - a) < 1e-12) break;
        if (f < a)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(tail_mass(mid, sqrt_u) - a) > 1e-10)
        fail(ErrorCode::numerical, "solve_theta: bisection did not converge");
    return mid;
}

GammaPCPrior elicit_gamma_prior(double u, double a) {
    GammaPCPrior p;
    p.theta = solve_theta(u, a);
    p.elicitation = {u, a};
    return p;
}

TauPCPrior elicit_tau_prior(double u, double a) {
    if (!(u > 0.0))
        fail(ErrorCode::domain, "tau prior requires U > 0");
    check_unit_open(a, "a");
    TauPCPrior p;
    p.lambda = -std::log(a) / u;
    p.elicitation = {u, a};
    return p;
}

double pc_gamma_logpdf(double gamma, const GammaPCPrior& prior) {
    // Unbounded but integrable at 0; values within 1e-12 of either endpoint
    // are treated as out of domain rather than extrapolated.
    if (!(gamma > 1e-12 && gamma < 1.0 - 1e-12))
        fail(ErrorCode::domain,
             "pc_gamma density requires gamma strictly inside (0,1), got " +
                 std::to_string(gamma));
    const double t = prior.theta;
    const double sg = std::sqrt(gamma);
    return std::log(t) - t * sg - std::log(2.0 * sg) - std::log(-std::expm1(-t));
}

double pc_gamma_cdf(double gamma, const GammaPCPrior& prior) {
    if (gamma <= 0.0) return 0.0;
    if (gamma >= 1.0) return 1.0;
    return std::expm1(-prior.theta * std::sqrt(gamma)) / std::expm1(-prior.theta);
}

double pc_gamma_quantile(double p, const GammaPCPrior& prior) {
    if (!(p >= 0.0 && p <= 1.0))
        fail(ErrorCode::domain, "quantile level must lie in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double t = prior.theta;
    const double s = -std::log1p(p * std::expm1(-t)) / t;
    return s * s;
}

double pc_gamma_sample(const GammaPCPrior& prior, RngStream& rng) {
    return pc_gamma_quantile(rng.uniform01_open0(), prior);
}

double pc_tau_logpdf(double tau, const TauPCPrior& prior) {
    if (!(tau > 0.0))
        fail(ErrorCode::domain,
             "pc_tau density requires tau > 0, got " + std::to_string(tau));
    const double l = prior.lambda;
    return std::log(0.5 * l) - 1.5 * std::log(tau) - l / std::sqrt(tau);
}

double pc_tau_cdf(double tau, const TauPCPrior& prior) {
    if (tau <= 0.0) return 0.0;
    // 1/sqrt(tau) is Exp(lambda): P(tau <= t) = P(sigma >= t^{-1/2}).
    return std::exp(-prior.lambda / std::sqrt(tau));
}

double pc_tau_quantile(double p, const TauPCPrior& prior) {
    if (!(p > 0.0 && p < 1.0))
        fail(ErrorCode::domain, "quantile level must lie strictly in (0,1)");
    const double s = -prior.lambda / std::log(p);
    return s * s;
}

} // namespace vpmap
