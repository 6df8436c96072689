#include "vpmap/mcmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "vpmap/errors.hpp"

namespace vpmap {

void McmcConfig::validate() const {
    if (n_iterations < 1) fail(ErrorCode::validation, "mcmc: n_iterations < 1");
    if (burn_in < 0 || burn_in >= n_iterations)
        fail(ErrorCode::validation, "mcmc: burn_in must lie in [0, n_iterations)");
    if (thin < 1) fail(ErrorCode::validation, "mcmc: thin must be >= 1");
    if (n_chains < 1) fail(ErrorCode::validation, "mcmc: n_chains must be >= 1");
    if (jobs < 1) fail(ErrorCode::validation, "mcmc: jobs must be >= 1");
    if (!(alpha_prior_sd > 0.0))
        fail(ErrorCode::validation, "mcmc: alpha_prior_sd must be positive");
}

int PosteriorDraws::hyper_index(const std::string& name) const {
    for (std::size_t k = 0; k < hyper_names.size(); ++k)
        if (hyper_names[k] == name) return static_cast<int>(k);
    fail(ErrorCode::validation, "no hyperparameter named '" + name + "'");
}

EssResult ess_latent_update(
    const Eigen::VectorXd& block, const SpectralDecomposition& prior_spec,
    const std::function<double(const Eigen::VectorXd&)>& loglik, RngStream& rng,
    std::optional<double> current_loglik, int max_contractions) {
    if (block.size() != prior_spec.order())
        fail(ErrorCode::validation, "ess_latent_update: dimension mismatch");

    const Eigen::VectorXd nu = sample_igmrf(prior_spec, rng);
    const double cur_ll = current_loglik ? *current_loglik : loglik(block);
    const double log_y = cur_ll + std::log(rng.uniform01_open0());

    double theta = rng.uniform(0.0, 2.0 * M_PI);
    double theta_min = theta - 2.0 * M_PI;
    double theta_max = theta;

    EssResult out;
    for (int step = 0; step <= max_contractions; ++step) {
        Eigen::VectorXd prop = block * std::cos(theta) + nu * std::sin(theta);
        const double ll = loglik(prop);
        if (ll > log_y) {
            out.block = std::move(prop);
            out.loglik = ll;
            return out;
        }
        if (theta < 0.0)
            theta_min = theta;
        else
            theta_max = theta;
        theta = rng.uniform(theta_min, theta_max);
    }
    out.block = block;
    out.loglik = cur_ll;
    out.hit_max_contractions = true;
    return out;
}

namespace {

double logit(double x) { return std::log(x / (1.0 - x)); }
double inv_logit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Per-cell log likelihoods for the observed cells, in cell order.
Eigen::RowVectorXd pointwise_loglik(const Dataset& data,
                                    const Eigen::VectorXd& eta, Family family) {
    Eigen::RowVectorXd out(data.n_observed());
    int k = 0;
    for (int c = 0; c < data.n_cells(); ++c) {
        if (!data.observed[c]) continue;
        out(k++) = cell_loglik(data.y(c), data.exposure(c), eta(c), family);
    }
    return out;
}

struct HyperTransform {
    bool with_psi = false;

    int dim() const { return with_psi ? 5 : 3; }

    Eigen::VectorXd to_z(const Hyperparameters& h) const {
        Eigen::VectorXd z(dim());
        z(0) = std::log(h.tau);
        z(1) = logit(h.gamma);
        z(2) = logit(h.phi);
        if (with_psi) {
            z(3) = logit(*h.psi1);
            z(4) = logit(*h.psi2);
        }
        return z;
    }

    Hyperparameters to_h(const Eigen::VectorXd& z) const {
        Hyperparameters h;
        h.tau = std::exp(z(0));
        h.gamma = inv_logit(z(1));
        h.phi = inv_logit(z(2));
        if (with_psi) {
            h.psi1 = inv_logit(z(3));
            h.psi2 = inv_logit(z(4));
        }
        return h;
    }

    // log prior density of h plus the log Jacobian of the transform, so the
    // result is a density in z.
    double log_prior_z(const Eigen::VectorXd& z, const PriorSpec& priors) const {
        const Hyperparameters h = to_h(z);
        if (!(h.gamma > 1e-12 && h.gamma < 1.0 - 1e-12) ||
            !(h.phi > 1e-12 && h.phi < 1.0 - 1e-12) || !(h.tau > 0.0) ||
            !std::isfinite(h.tau))
            return -std::numeric_limits<double>::infinity();
        if (with_psi && (!(*h.psi1 > 1e-12 && *h.psi1 < 1.0 - 1e-12) ||
                         !(*h.psi2 > 1e-12 && *h.psi2 < 1.0 - 1e-12)))
            return -std::numeric_limits<double>::infinity();

        double lp = pc_tau_logpdf(h.tau, priors.tau) + z(0); // d tau / d z = tau
        if (priors.gamma_pc)
            lp += pc_gamma_logpdf(h.gamma, *priors.gamma_pc);
        // Uniform(0,1) contributes log(1) = 0 on the natural scale.
        lp += std::log(h.gamma * (1.0 - h.gamma));
        lp += std::log(h.phi * (1.0 - h.phi));
        if (with_psi) {
            lp += std::log(*h.psi1 * (1.0 - *h.psi1));
            lp += std::log(*h.psi2 * (1.0 - *h.psi2));
        }
        return lp;
    }
};

// Expansions of the latent blocks onto the time-fastest grid.
struct GridExpand {
    int n1 = 0, n2 = 0;

    void add_time(Eigen::VectorXd& eta, const Eigen::VectorXd& b,
                  double coef) const {
        for (int j = 0; j < n2; ++j)
            eta.segment(static_cast<Eigen::Index>(j) * n1, n1) += coef * b;
    }
    void add_space(Eigen::VectorXd& eta, const Eigen::VectorXd& b,
                   double coef) const {
        for (int j = 0; j < n2; ++j)
            eta.segment(static_cast<Eigen::Index>(j) * n1, n1).array() +=
                coef * b(j);
    }
};

struct Weights {
    double w1s = 0.0, w1i = 0.0, w2s = 0.0, w2i = 0.0, wd = 0.0;
};

Weights weights_of(const Hyperparameters& h, bool with_psi) {
    Weights w;
    const double inv_sd = std::sqrt(1.0 / h.tau);
    const double m = std::sqrt(1.0 - h.gamma);
    w.wd = inv_sd * std::sqrt(h.gamma);
    const double t = std::sqrt(1.0 - h.phi), s = std::sqrt(h.phi);
    if (with_psi) {
        w.w1i = inv_sd * m * t * std::sqrt(*h.psi1);
        w.w1s = inv_sd * m * t * std::sqrt(1.0 - *h.psi1);
        w.w2i = inv_sd * m * s * std::sqrt(*h.psi2);
        w.w2s = inv_sd * m * s * std::sqrt(1.0 - *h.psi2);
    } else {
        w.w1s = inv_sd * m * t;
        w.w2s = inv_sd * m * s;
    }
    return w;
}

struct ChainStats {
    long joint_acc = 0, joint_tot = 0;
    std::vector<long> alpha_acc, alpha_tot;
    Eigen::VectorXd eta_sum;
    double max_resid = 0.0;
    long warnings = 0;
};

} // namespace

PosteriorDraws run_mcmc(const Dataset& data, const ModelSpec& spec,
                        const PriorSpec& priors, const McmcConfig& cfg) {
    cfg.validate();
    if (data.n1 != spec.n1 || data.n2 != spec.n2)
        fail(ErrorCode::validation, "run_mcmc: dataset grid does not match spec");

    const ModelStructures ms = build_structures(spec);
    const bool with_psi = spec.include_iid_main;
    const HyperTransform tf{with_psi};
    const GridExpand grid{spec.n1, spec.n2};
    const int n_cells = data.n_cells();
    const int n_obs = data.n_observed();
    const int n_hyper = tf.dim();
    const int n_alpha = ms.n_alpha;

    const SpectralDecomposition sd_eps1 =
        with_psi ? spectral(identity_structure(spec.n1)) : SpectralDecomposition{};
    const SpectralDecomposition sd_eps2 =
        with_psi ? spectral(identity_structure(spec.n2)) : SpectralDecomposition{};

    const long retained_per_chain =
        (cfg.n_iterations - cfg.burn_in + cfg.thin - 1) / cfg.thin;
    const long retained_total = retained_per_chain * cfg.n_chains;

    PosteriorDraws draws;
    draws.hyper_names = {"tau", "gamma", "phi"};
    if (with_psi) {
        draws.hyper_names.push_back("psi1");
        draws.hyper_names.push_back("psi2");
    }
    draws.hyper.resize(retained_total, n_hyper);
    draws.alpha.resize(retained_total, n_alpha);
    draws.loglik.resize(retained_total);
    draws.chain.resize(retained_total);
    if (cfg.store_pointwise) {
        draws.pointwise.resize(retained_total, n_obs);
        for (int c = 0; c < n_cells; ++c)
            if (data.observed[c]) draws.pointwise_cells.push_back(c);
    }
    if (cfg.store_latent) {
        const int latent_dim = n_alpha + spec.n1 + spec.n2 + n_cells +
                               (with_psi ? spec.n1 + spec.n2 : 0);
        draws.latent.resize(retained_total, latent_dim);
        for (int k = 0; k < n_alpha; ++k)
            draws.latent_names.push_back("alpha" + std::to_string(k + 1));
        for (int i = 0; i < spec.n1; ++i)
            draws.latent_names.push_back("beta1_" + std::to_string(i + 1));
        if (with_psi)
            for (int i = 0; i < spec.n1; ++i)
                draws.latent_names.push_back("eps1_" + std::to_string(i + 1));
        for (int j = 0; j < spec.n2; ++j)
            draws.latent_names.push_back("beta2_" + std::to_string(j + 1));
        if (with_psi)
            for (int j = 0; j < spec.n2; ++j)
                draws.latent_names.push_back("eps2_" + std::to_string(j + 1));
        for (int c = 0; c < n_cells; ++c)
            draws.latent_names.push_back("delta_" + std::to_string(c + 1));
    }
    draws.eta_mean = Eigen::VectorXd::Zero(n_cells);
    draws.alpha_accept_rates.assign(n_alpha, 0.0);

    std::vector<ChainStats> stats(cfg.n_chains);

    const auto run_chain = [&](int chain) {
        ChainStats& st = stats[chain];
        st.alpha_acc.assign(n_alpha, 0);
        st.alpha_tot.assign(n_alpha, 0);
        st.eta_sum = Eigen::VectorXd::Zero(n_cells);

        RngStream rng(cfg.seed, static_cast<std::uint64_t>(chain));

        // Initialization: prior medians for the hyperparameters, zero latents.
        Hyperparameters h;
        h.tau = pc_tau_quantile(0.5, priors.tau);
        h.gamma = priors.gamma_pc ? pc_gamma_quantile(0.5, *priors.gamma_pc) : 0.5;
        h.phi = 0.5;
        if (with_psi) {
            h.psi1 = 0.5;
            h.psi2 = 0.5;
        }
        Eigen::VectorXd z = tf.to_z(h);
        LatentField x;
        x.alpha = Eigen::VectorXd::Zero(n_alpha);
        x.beta1 = Eigen::VectorXd::Zero(spec.n1);
        x.beta2 = Eigen::VectorXd::Zero(spec.n2);
        x.delta = Eigen::VectorXd::Zero(n_cells);
        if (with_psi) {
            x.eps1 = Eigen::VectorXd::Zero(spec.n1);
            x.eps2 = Eigen::VectorXd::Zero(spec.n2);
        }

        Eigen::VectorXd alpha_expand(n_cells);
        const auto refresh_alpha_expand = [&]() {
            for (int j = 0; j < spec.n2; ++j) {
                double a = x.alpha(0);
                if (ms.alpha_index[j] > 0) a += x.alpha(ms.alpha_index[j]);
                alpha_expand.segment(static_cast<Eigen::Index>(j) * spec.n1, spec.n1)
                    .setConstant(a);
            }
        };
        refresh_alpha_expand();

        Weights w = weights_of(h, with_psi);
        const auto rebuild_eta = [&](const Weights& wt) {
            Eigen::VectorXd eta = alpha_expand;
            grid.add_time(eta, x.beta1, wt.w1s);
            grid.add_space(eta, x.beta2, wt.w2s);
            if (with_psi) {
                grid.add_time(eta, x.eps1, wt.w1i);
                grid.add_space(eta, x.eps2, wt.w2i);
            }
            eta += wt.wd * x.delta;
            return eta;
        };
        Eigen::VectorXd eta = rebuild_eta(w);
        double ll = log_likelihood(data, eta, spec.family);
        {
            const double lp0 = tf.log_prior_z(z, priors);
            if (!std::isfinite(ll) || !std::isfinite(lp0)) {
                std::ostringstream dump;
                dump << "run_mcmc: non-finite log-posterior at initialization: "
                     << "loglik=" << ll << " logprior=" << lp0
                     << " tau=" << h.tau << " gamma=" << h.gamma
                     << " phi=" << h.phi;
                fail(ErrorCode::init, dump.str());
            }
        }

        // Adaptive state (frozen after burn-in).
        double log_scale = std::log(0.3);
        Eigen::VectorXd z_mean = z;
        Eigen::VectorXd z_var = Eigen::VectorXd::Constant(n_hyper, 0.05);
        std::vector<double> alpha_log_scale(n_alpha, std::log(0.1));
        long adapt_count = 0;
        long row = static_cast<long>(chain) * retained_per_chain;

        for (long iter = 0; iter < cfg.n_iterations; ++iter) {
            const bool adapting = iter < cfg.burn_in;
            const double rm_step = std::pow(static_cast<double>(iter + 1), -0.6);

            // Intercept moves (scalar random-walk Metropolis, normal prior).
            for (int k = 0; k < n_alpha; ++k) {
                const double step = std::exp(alpha_log_scale[k]) * rng.normal();
                const double a_old = x.alpha(k);
                const double a_new = a_old + step;
                Eigen::VectorXd eta_new = eta;
                for (int j = 0; j < spec.n2; ++j) {
                    if (k == 0 || ms.alpha_index[j] == k)
                        eta_new
                            .segment(static_cast<Eigen::Index>(j) * spec.n1,
                                     spec.n1)
                            .array() += step;
                }
                const double ll_new = log_likelihood(data, eta_new, spec.family);
                const double sd2 = cfg.alpha_prior_sd * cfg.alpha_prior_sd;
                const double log_ratio =
                    ll_new - ll - 0.5 * (a_new * a_new - a_old * a_old) / sd2;
                const bool accept = std::log(rng.uniform01_open0()) < log_ratio;
                if (accept) {
                    x.alpha(k) = a_new;
                    eta.swap(eta_new);
                    ll = ll_new;
                }
                if (adapting) {
                    alpha_log_scale[k] += rm_step * ((accept ? 1.0 : 0.0) -
                                                     cfg.target_accept_scalar);
                } else {
                    st.alpha_acc[k] += accept;
                    ++st.alpha_tot[k];
                }
            }
            refresh_alpha_expand();

            // Elliptical slice updates, one latent block at a time. Each
            // block enters eta linearly; "base" is eta with it removed.
            const auto ess_block = [&](Eigen::VectorXd& block,
                                       const SpectralDecomposition& sd,
                                       auto add_block) {
                Eigen::VectorXd base = eta;
                add_block(base, block, -1.0);
                const auto llfun = [&](const Eigen::VectorXd& b) {
                    Eigen::VectorXd e = base;
                    add_block(e, b, 1.0);
                    return log_likelihood(data, e, spec.family);
                };
                EssResult res = ess_latent_update(block, sd, llfun, rng, ll);
                if (res.hit_max_contractions) ++st.warnings;
                block = std::move(res.block);
                eta = base;
                add_block(eta, block, 1.0);
                ll = res.loglik;
            };

            ess_block(x.beta1, ms.sd1,
                      [&](Eigen::VectorXd& e, const Eigen::VectorXd& b,
                          double sign) { grid.add_time(e, b, sign * w.w1s); });
            if (with_psi)
                ess_block(x.eps1, sd_eps1,
                          [&](Eigen::VectorXd& e, const Eigen::VectorXd& b,
                              double sign) { grid.add_time(e, b, sign * w.w1i); });
            ess_block(x.beta2, ms.sd2,
                      [&](Eigen::VectorXd& e, const Eigen::VectorXd& b,
                          double sign) { grid.add_space(e, b, sign * w.w2s); });
            if (with_psi)
                ess_block(x.eps2, sd_eps2,
                          [&](Eigen::VectorXd& e, const Eigen::VectorXd& b,
                              double sign) { grid.add_space(e, b, sign * w.w2i); });
            ess_block(x.delta, ms.interaction.spectral,
                      [&](Eigen::VectorXd& e, const Eigen::VectorXd& b,
                          double sign) { e += sign * w.wd * b; });

            // Joint hyperparameter move on the transformed scale.
            {
                Eigen::VectorXd z_prop(n_hyper);
                for (int d = 0; d < n_hyper; ++d) {
                    const double sd = std::exp(log_scale) *
                                      std::sqrt(std::max(z_var(d), 1e-4));
                    z_prop(d) = z(d) + sd * rng.normal();
                }
                const double lp_cur = tf.log_prior_z(z, priors);
                const double lp_prop = tf.log_prior_z(z_prop, priors);
                bool accept = false;
                if (std::isfinite(lp_prop)) {
                    const Hyperparameters h_prop = tf.to_h(z_prop);
                    const Weights w_prop = weights_of(h_prop, with_psi);
                    const Eigen::VectorXd eta_prop = rebuild_eta(w_prop);
                    const double ll_prop =
                        log_likelihood(data, eta_prop, spec.family);
                    const double log_ratio = ll_prop + lp_prop - ll - lp_cur;
                    if (std::log(rng.uniform01_open0()) < log_ratio) {
                        accept = true;
                        z = z_prop;
                        h = h_prop;
                        w = w_prop;
                        eta = eta_prop;
                        ll = ll_prop;
                    }
                }
                if (adapting) {
                    log_scale += rm_step * ((accept ? 1.0 : 0.0) -
                                            cfg.target_accept_joint);
                    ++adapt_count;
                    const Eigen::VectorXd dz = z - z_mean;
                    z_mean += dz / static_cast<double>(adapt_count);
                    z_var += ((z - z_mean).cwiseProduct(dz) - z_var) /
                             static_cast<double>(adapt_count);
                } else {
                    st.joint_acc += accept;
                    ++st.joint_tot;
                }
            }

            // Record retained draws.
            if (iter >= cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0) {
                draws.hyper(row, 0) = h.tau;
                draws.hyper(row, 1) = h.gamma;
                draws.hyper(row, 2) = h.phi;
                if (with_psi) {
                    draws.hyper(row, 3) = *h.psi1;
                    draws.hyper(row, 4) = *h.psi2;
                }
                draws.alpha.row(row) = x.alpha.transpose();
                draws.loglik(row) = ll;
                draws.chain[row] = chain;
                if (cfg.store_pointwise && n_obs > 0)
                    draws.pointwise.row(row) =
                        pointwise_loglik(data, eta, spec.family);
                if (cfg.store_latent) {
                    int off = 0;
                    auto seg = [&](const Eigen::VectorXd& v) {
                        draws.latent.row(row).segment(off, v.size()) =
                            v.transpose();
                        off += static_cast<int>(v.size());
                    };
                    seg(x.alpha);
                    seg(x.beta1);
                    if (with_psi) seg(x.eps1);
                    seg(x.beta2);
                    if (with_psi) seg(x.eps2);
                    seg(x.delta);
                }
                st.eta_sum += eta;
                st.max_resid =
                    std::max(st.max_resid, max_constraint_residual(x, ms));
                ++row;
            }
        }
    };

    if (cfg.jobs <= 1 || cfg.n_chains == 1) {
        for (int chain = 0; chain < cfg.n_chains; ++chain) run_chain(chain);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(cfg.jobs, cfg.n_chains);
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&]() {
                for (int c = next.fetch_add(1); c < cfg.n_chains;
                     c = next.fetch_add(1))
                    run_chain(c);
            });
        for (auto& th : pool) th.join();
    }

    long joint_acc = 0, joint_tot = 0;
    std::vector<long> alpha_acc(n_alpha, 0), alpha_tot(n_alpha, 0);
    for (const ChainStats& st : stats) {
        joint_acc += st.joint_acc;
        joint_tot += st.joint_tot;
        for (int k = 0; k < n_alpha; ++k) {
            alpha_acc[k] += st.alpha_acc[k];
            alpha_tot[k] += st.alpha_tot[k];
        }
        draws.eta_mean += st.eta_sum;
        draws.max_constraint_residual =
            std::max(draws.max_constraint_residual, st.max_resid);
        draws.ess_contraction_warnings += st.warnings;
    }
    if (retained_total > 0)
        draws.eta_mean /= static_cast<double>(retained_total);
    draws.joint_accept_rate =
        joint_tot > 0 ? static_cast<double>(joint_acc) / joint_tot : 0.0;
    for (int k = 0; k < n_alpha; ++k)
        draws.alpha_accept_rates[k] =
            alpha_tot[k] > 0 ? static_cast<double>(alpha_acc[k]) / alpha_tot[k]
                             : 0.0;
    return draws;
}

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty())
        fail(ErrorCode::validation, "quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        fail(ErrorCode::domain, "quantile level must lie in [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

std::vector<double> column(const PosteriorDraws& draws, const std::string& name) {
    const int idx = draws.hyper_index(name);
    std::vector<double> v(draws.n_retained());
    for (long r = 0; r < draws.n_retained(); ++r) v[r] = draws.hyper(r, idx);
    return v;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

} // namespace

VpTable vp_table(const PosteriorDraws& draws) {
    if (draws.n_retained() == 0)
        fail(ErrorCode::validation, "vp_table: no retained draws");
    VpTable t;
    // Complement rows are reported as 1 - estimate, so each pair of means
    // sums to one exactly. Quantiles of 1 - x are the reflected quantiles.
    {
        const auto v = column(draws, "gamma");
        const double m = mean_of(v);
        const double lo = quantile_type7(v, 0.025);
        const double hi = quantile_type7(v, 0.975);
        t.rows.push_back(
            {"main+int", "main", "1-gamma", 1.0 - m, 1.0 - hi, 1.0 - lo});
        t.rows.push_back({"main+int", "int", "gamma", m, lo, hi});
    }
    {
        const auto v = column(draws, "phi");
        const double m = mean_of(v);
        const double lo = quantile_type7(v, 0.025);
        const double hi = quantile_type7(v, 0.975);
        t.rows.push_back({"main", "space", "phi", m, lo, hi});
        t.rows.push_back({"main", "time", "1-phi", 1.0 - m, 1.0 - hi, 1.0 - lo});
    }
    const bool with_psi =
        std::find(draws.hyper_names.begin(), draws.hyper_names.end(), "psi1") !=
        draws.hyper_names.end();
    if (with_psi) {
        const auto add = [&](const std::string& level1, const std::string& est,
                             const std::vector<double>& v) {
            const double m = mean_of(v);
            const double lo = quantile_type7(v, 0.025);
            const double hi = quantile_type7(v, 0.975);
            t.rows.push_back({level1, "iid", est, m, lo, hi});
            t.rows.push_back(
                {level1, "str", "1-" + est, 1.0 - m, 1.0 - hi, 1.0 - lo});
        };
        add("time", "psi1", column(draws, "psi1"));
        add("space", "psi2", column(draws, "psi2"));
    }
    return t;
}

InformationCriteria dic_waic(const PosteriorDraws& draws, const Dataset& data,
                             const ModelSpec& spec) {
    if (draws.n_retained() == 0)
        fail(ErrorCode::validation, "dic_waic: no retained draws");
    if (draws.pointwise.rows() != draws.n_retained())
        fail(ErrorCode::validation,
             "dic_waic: pointwise log-likelihood was not stored");

    InformationCriteria ic;
    const long s = draws.n_retained();
    ic.unstable = s < 100;
    ic.deviance_mean = -2.0 * draws.loglik.mean();
    ic.deviance_at_mean =
        -2.0 * log_likelihood(data, draws.eta_mean, spec.family);
    ic.p_d = ic.deviance_mean - ic.deviance_at_mean;
    ic.dic = ic.deviance_mean + ic.p_d;

    const int n_obs = static_cast<int>(draws.pointwise.cols());
    double lppd = 0.0, p_waic = 0.0;
    for (int c = 0; c < n_obs; ++c) {
        const auto col = draws.pointwise.col(c);
        const double mx = col.maxCoeff();
        lppd += mx + std::log((col.array() - mx).exp().mean());
        if (s > 1) {
            const double mean_ll = col.mean();
            p_waic += (col.array() - mean_ll).square().sum() /
                      static_cast<double>(s - 1);
        }
    }
    ic.lppd = lppd;
    ic.p_waic = p_waic;
    ic.waic = -2.0 * (lppd - p_waic);
    return ic;
}

std::map<std::string, double> split_rhat(const PosteriorDraws& draws) {
    std::map<std::string, double> out;
    const long s = draws.n_retained();
    if (s < 4) return out;

    // Split every chain's retained sequence in half.
    std::vector<std::vector<long>> sequences;
    int n_chains = 0;
    for (long r = 0; r < s; ++r) n_chains = std::max(n_chains, draws.chain[r] + 1);
    for (int c = 0; c < n_chains; ++c) {
        std::vector<long> rows;
        for (long r = 0; r < s; ++r)
            if (draws.chain[r] == c) rows.push_back(r);
        if (rows.size() < 4) continue;
        const std::size_t half = rows.size() / 2;
        sequences.emplace_back(rows.begin(), rows.begin() + half);
        sequences.emplace_back(rows.begin() + half, rows.begin() + 2 * half);
    }
    if (sequences.size() < 2) return out;

    const long n = static_cast<long>(sequences[0].size());
    for (std::size_t k = 0; k < draws.hyper_names.size(); ++k) {
        std::vector<double> means, vars;
        for (const auto& seq : sequences) {
            double m = 0.0;
            for (long r : seq) m += draws.hyper(r, k);
            m /= static_cast<double>(seq.size());
            double v = 0.0;
            for (long r : seq) {
                const double d = draws.hyper(r, k) - m;
                v += d * d;
            }
            v /= static_cast<double>(seq.size() - 1);
            means.push_back(m);
            vars.push_back(v);
        }
        const double m_chains = static_cast<double>(means.size());
        const double grand =
            std::accumulate(means.begin(), means.end(), 0.0) / m_chains;
        double b = 0.0;
        for (double m : means) b += (m - grand) * (m - grand);
        b *= static_cast<double>(n) / (m_chains - 1.0);
        const double w =
            std::accumulate(vars.begin(), vars.end(), 0.0) / m_chains;
        const double var_plus =
            (static_cast<double>(n - 1) / n) * w + b / static_cast<double>(n);
        out[draws.hyper_names[k]] = w > 0.0 ? std::sqrt(var_plus / w) : 1.0;
    }
    return out;
}

double ks_distance(std::vector<double> draws,
                   const std::function<double(double)>& cdf) {
    if (draws.empty()) fail(ErrorCode::validation, "ks_distance: empty sample");
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t k = 0; k < draws.size(); ++k) {
        const double f = cdf(draws[k]);
        d = std::max(d, std::abs((static_cast<double>(k) + 1.0) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(k) / n));
    }
    return d;
}

} // namespace vpmap
