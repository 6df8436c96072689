#include "vpmap/cli.hpp"

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "vpmap/config.hpp"
#include "vpmap/csv.hpp"
#include "vpmap/errors.hpp"
#include "vpmap/kld.hpp"
#include "vpmap/mcmc.hpp"

namespace vpmap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("VPMAP_LOG");
        if (!env) return LogLevel::warn;
        const std::string s = env;
        if (s == "debug") return LogLevel::debug;
        if (s == "info") return LogLevel::info;
        if (s == "error") return LogLevel::error;
        return LogLevel::warn;
    }();
    return level;
}

void log_msg(LogLevel lvl, const std::string& msg) {
    static const char* names[] = {"debug", "info", "warn", "error"};
    if (lvl >= log_level())
        std::cerr << "vpmap [" << names[static_cast<int>(lvl)] << "] " << msg
                  << "\n";
}

// Stage-based exit-code mapping: the same error class means a different
// exit code depending on whether it happened while reading the config,
// reading data files, or computing.
enum class Stage { config, data, compute };

int exit_code_for(Stage stage) {
    switch (stage) {
        case Stage::config: return kExitConfig;
        case Stage::data: return kExitData;
        case Stage::compute: return kExitNumerical;
    }
    return kExitNumerical;
}

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> jobs;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << content;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const Overrides& ov, const std::string& config_text,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["tool"] = "vpmap";
    m["tool_version"] = kToolVersion;
    m["config_path"] = ov.config_path;
    m["config_hash"] = fnv1a_hex(config_text);
    m["seed"] = seed;
    m["outputs"] = outputs;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

PriorSpec make_prior_spec(const PriorChoice& gamma_prior, double tau_u,
                          double tau_a) {
    PriorSpec p;
    if (gamma_prior.is_pc)
        p.gamma_pc = elicit_gamma_prior(gamma_prior.u, gamma_prior.a);
    p.tau = elicit_tau_prior(tau_u, tau_a);
    return p;
}

std::string vp_table_csv(const VpTable& t) {
    std::ostringstream out;
    out << "level1,level2,estimator,mean,q025,q975\n";
    for (const auto& r : t.rows)
        out << r.level1 << "," << r.level2 << "," << r.estimator << ","
            << format_double(r.mean) << "," << format_double(r.lo) << ","
            << format_double(r.hi) << "\n";
    return out.str();
}

json vp_table_json(const VpTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"level1", r.level1},
                        {"level2", r.level2},
                        {"estimator", r.estimator},
                        {"mean", r.mean},
                        {"q025", r.lo},
                        {"q975", r.hi}});
    return json{{"rows", rows}};
}

std::string draws_csv(const PosteriorDraws& d) {
    std::ostringstream out;
    out << "draw,chain";
    for (const auto& n : d.hyper_names) out << "," << n;
    for (int k = 0; k < d.alpha.cols(); ++k) out << ",alpha" << (k + 1);
    out << ",loglik\n";
    for (long r = 0; r < d.n_retained(); ++r) {
        out << (r + 1) << "," << d.chain[r];
        for (int k = 0; k < d.hyper.cols(); ++k)
            out << "," << format_double(d.hyper(r, k));
        for (int k = 0; k < d.alpha.cols(); ++k)
            out << "," << format_double(d.alpha(r, k));
        out << "," << format_double(d.loglik(r)) << "\n";
    }
    return out.str();
}

std::string latent_csv(const PosteriorDraws& d) {
    std::ostringstream out;
    out << "draw,chain";
    for (const auto& n : d.latent_names) out << "," << n;
    out << "\n";
    for (long r = 0; r < d.latent.rows(); ++r) {
        out << (r + 1) << "," << d.chain[r];
        for (int k = 0; k < d.latent.cols(); ++k)
            out << "," << format_double(d.latent(r, k));
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------- fit ----

int cmd_fit(const Overrides& ov) {
    Stage stage = Stage::config;
    try {
        const std::string config_text = read_text_file(ov.config_path);
        FitConfig cfg = parse_fit_config(config_text);
        if (ov.seed) cfg.mcmc.seed = *ov.seed;
        if (ov.out_dir) cfg.out_dir = *ov.out_dir;
        if (ov.jobs) cfg.mcmc.jobs = *ov.jobs;
        const PriorSpec priors =
            make_prior_spec(cfg.gamma_prior, cfg.tau_u, cfg.tau_a);

        stage = Stage::data;
        const AdjacencyGraph graph = parse_graph_file(cfg.graph_path);
        const Dataset data =
            read_data_csv_file(cfg.data_path, cfg.family, graph.n_areas);

        stage = Stage::compute;
        ModelSpec spec;
        spec.family = cfg.family;
        spec.temporal_order = cfg.temporal_order;
        spec.interaction_type = cfg.interaction_type;
        spec.include_iid_main = cfg.include_iid_main;
        spec.n1 = data.n1;
        spec.n2 = data.n2;
        spec.graph = graph;
        log_msg(LogLevel::info,
                "fit: n1=" + std::to_string(spec.n1) +
                    " n2=" + std::to_string(spec.n2) + " type=" +
                    to_string(spec.interaction_type));

        const PosteriorDraws draws = run_mcmc(data, spec, priors, cfg.mcmc);
        const VpTable table = vp_table(draws);
        const InformationCriteria ic = dic_waic(draws, data, spec);
        const auto rhat = split_rhat(draws);

        fs::create_directories(cfg.out_dir);
        const fs::path dir(cfg.out_dir);
        write_file(dir / "vp_table.csv", vp_table_csv(table));
        write_file(dir / "vp_table.json", vp_table_json(table).dump(2) + "\n");
        write_file(dir / "draws.csv", draws_csv(draws));
        std::vector<std::string> outputs = {"vp_table.csv", "vp_table.json",
                                            "draws.csv", "diagnostics.json"};
        if (cfg.mcmc.store_latent) {
            write_file(dir / "latent.csv", latent_csv(draws));
            outputs.push_back("latent.csv");
        }

        json diag;
        diag["joint_accept_rate"] = draws.joint_accept_rate;
        diag["alpha_accept_rates"] = draws.alpha_accept_rates;
        diag["max_constraint_residual"] = draws.max_constraint_residual;
        diag["ess_contraction_warnings"] = draws.ess_contraction_warnings;
        diag["n_retained"] = draws.n_retained();
        diag["rhat"] = rhat;
        diag["dic"] = {{"dic", ic.dic},
                       {"deviance_mean", ic.deviance_mean},
                       {"deviance_at_mean", ic.deviance_at_mean},
                       {"p_d", ic.p_d}};
        diag["waic"] = {{"waic", ic.waic},
                        {"lppd", ic.lppd},
                        {"p_waic", ic.p_waic},
                        {"unstable", ic.unstable}};
        diag["interaction"] = {
            {"type", to_string(spec.interaction_type)},
            {"rank", interaction_rank(spec.interaction_type, spec.n1, spec.n2,
                                      spec.temporal_order,
                                      graph.n_components())},
            {"constraints", constraint_rows(spec.interaction_type, spec.n1,
                                            spec.n2)
                                .rows()}};
        write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
        write_manifest(dir, "fit", ov, config_text, cfg.mcmc.seed, outputs);

        std::cout << vp_table_csv(table);
        std::cout << "dic: " << format_double(ic.dic)
                  << "  waic: " << format_double(ic.waic) << "\n";
        return kExitOk;
    } catch (const VpError& e) {
        std::cerr << "vpmap fit: " << e.what() << "\n";
        return exit_code_for(stage);
    }
}

// ----------------------------------------------------------- simulate ----

LatentField load_effects_csv(const std::string& path, int n1, int n2) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open effects file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("block,index,value", 0) != 0)
        fail(ErrorCode::data,
             "effects CSV must start with header 'block,index,value'");
    LatentField x;
    x.alpha = Eigen::VectorXd::Zero(1);
    x.beta1 = Eigen::VectorXd::Zero(n1);
    x.beta2 = Eigen::VectorXd::Zero(n2);
    x.delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n1) * n2);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string block, idx_s, val_s;
        if (!std::getline(ls, block, ',') || !std::getline(ls, idx_s, ',') ||
            !std::getline(ls, val_s))
            fail(ErrorCode::data, "effects CSV line " + std::to_string(line_no) +
                                      ": expected 3 fields");
        int idx = 0;
        double val = 0.0;
        try {
            idx = std::stoi(idx_s);
            val = std::stod(val_s);
        } catch (const std::exception&) {
            fail(ErrorCode::data, "effects CSV line " + std::to_string(line_no) +
                                      ": non-numeric field");
        }
        Eigen::VectorXd* target = nullptr;
        if (block == "beta1")
            target = &x.beta1;
        else if (block == "beta2")
            target = &x.beta2;
        else if (block == "delta")
            target = &x.delta;
        else
            fail(ErrorCode::data, "effects CSV line " + std::to_string(line_no) +
                                      ": unknown block '" + block + "'");
        if (idx < 1 || idx > target->size())
            fail(ErrorCode::data, "effects CSV line " + std::to_string(line_no) +
                                      ": index out of range");
        (*target)(idx - 1) = val;
    }
    return x;
}

struct ReplicateResult {
    double post_mean_gamma = 0.0;
    double post_mean_phi = 0.0;
    double post_mean_tau = 0.0;
    double gamma_q025 = 0.0;
    double gamma_q975 = 0.0;
};

int cmd_simulate(const Overrides& ov) {
    Stage stage = Stage::config;
    try {
        const std::string config_text = read_text_file(ov.config_path);
        SimulateConfig cfg = parse_simulate_config(config_text);
        if (ov.seed) cfg.mcmc.seed = *ov.seed;
        if (ov.out_dir) cfg.out_dir = *ov.out_dir;
        if (ov.jobs) cfg.jobs = *ov.jobs;
        const PriorSpec priors =
            make_prior_spec(cfg.gamma_prior, cfg.tau_u, cfg.tau_a);

        stage = Stage::data;
        const AdjacencyGraph graph =
            cfg.graph_path.empty()
                ? make_lattice_graph(cfg.lattice_rows, cfg.lattice_cols)
                : parse_graph_file(cfg.graph_path);
        std::optional<LatentField> fixed_effects;
        if (cfg.effects != "prior")
            fixed_effects =
                load_effects_csv(cfg.effects, cfg.n1, graph.n_areas);

        stage = Stage::compute;
        ModelSpec spec;
        spec.family = Family::binomial;
        spec.temporal_order = cfg.temporal_order;
        spec.interaction_type = cfg.interaction_type;
        spec.include_iid_main = false;
        spec.n1 = cfg.n1;
        spec.n2 = graph.n_areas;
        spec.graph = graph;
        const ModelStructures ms = build_structures(spec);

        double pop = cfg.base_population;
        if (cfg.size_level == "smaller") pop /= 10.0;
        if (cfg.size_level == "larger") pop *= 10.0;
        pop = std::max(1.0, std::round(pop));
        const Eigen::VectorXd pop_vec =
            Eigen::VectorXd::Constant(spec.n2, pop);

        // Generator settings: tau = 1, phi = 0.5 held fixed; gamma set by
        // the scenario; no intercept and no iid terms.
        Hyperparameters h_true;
        h_true.tau = 1.0;
        h_true.gamma = cfg.gamma_true();
        h_true.phi = 0.5;

        log_msg(LogLevel::info,
                "simulate: " + cfg.scenario + " gamma=" +
                    std::to_string(h_true.gamma) + " pop=" + std::to_string(pop) +
                    " replicates=" + std::to_string(cfg.replicates));

        std::vector<ReplicateResult> results(cfg.replicates);
        std::atomic<int> next{0};
        std::atomic<bool> failed{false};
        std::string fail_msg;
        std::mutex fail_mutex;

        const auto worker = [&]() {
            for (int rep = next.fetch_add(1); rep < cfg.replicates;
                 rep = next.fetch_add(1)) {
                if (failed.load()) return;
                try {
                    RngStream gen_rng(cfg.mcmc.seed,
                                      900000ULL + static_cast<std::uint64_t>(rep));
                    LatentField effects =
                        fixed_effects ? *fixed_effects
                                      : sample_latent_prior(ms, spec, gen_rng);
                    effects.alpha = Eigen::VectorXd::Zero(ms.n_alpha);
                    const Dataset data = simulate_dataset(h_true, effects,
                                                          pop_vec, spec, gen_rng);
                    McmcConfig mc = cfg.mcmc;
                    mc.jobs = 1;
                    mc.store_pointwise = false;
                    mc.seed = cfg.mcmc.seed + 7919ULL * (rep + 1);
                    const PosteriorDraws draws =
                        run_mcmc(data, spec, priors, mc);
                    const int gi = draws.hyper_index("gamma");
                    const int pi = draws.hyper_index("phi");
                    const int ti = draws.hyper_index("tau");
                    ReplicateResult r;
                    r.post_mean_gamma = draws.hyper.col(gi).mean();
                    r.post_mean_phi = draws.hyper.col(pi).mean();
                    r.post_mean_tau = draws.hyper.col(ti).mean();
                    std::vector<double> g(draws.n_retained());
                    for (long i = 0; i < draws.n_retained(); ++i)
                        g[i] = draws.hyper(i, gi);
                    r.gamma_q025 = quantile_type7(g, 0.025);
                    r.gamma_q975 = quantile_type7(g, 0.975);
                    results[rep] = r;
                } catch (const VpError& e) {
                    std::lock_guard<std::mutex> lock(fail_mutex);
                    failed = true;
                    fail_msg = "replicate " + std::to_string(rep + 1) + ": " +
                               e.what();
                }
            }
        };
        if (cfg.jobs <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const int workers = std::min(cfg.jobs, cfg.replicates);
            for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (failed) fail(ErrorCode::numerical, fail_msg);

        fs::create_directories(cfg.out_dir);
        const fs::path dir(cfg.out_dir);
        std::ostringstream reps;
        reps << "replicate,post_mean_gamma,gamma_q025,gamma_q975,"
                "post_mean_phi,post_mean_tau\n";
        double sum_g = 0.0, sum_g2 = 0.0, sum_p = 0.0, sum_t = 0.0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            const auto& r = results[rep];
            reps << (rep + 1) << "," << format_double(r.post_mean_gamma) << ","
                 << format_double(r.gamma_q025) << ","
                 << format_double(r.gamma_q975) << ","
                 << format_double(r.post_mean_phi) << ","
                 << format_double(r.post_mean_tau) << "\n";
            sum_g += r.post_mean_gamma;
            sum_g2 += r.post_mean_gamma * r.post_mean_gamma;
            sum_p += r.post_mean_phi;
            sum_t += r.post_mean_tau;
        }
        const double n = cfg.replicates;
        const double mean_g = sum_g / n;
        const double sd_g =
            cfg.replicates > 1
                ? std::sqrt(std::max(0.0, (sum_g2 - n * mean_g * mean_g) /
                                              (n - 1.0)))
                : 0.0;
        std::ostringstream summary;
        summary << "scenario,size_level,prior,true_gamma,replicates,"
                   "mean_post_gamma,sd_post_gamma,mean_post_phi,mean_post_tau\n";
        const std::string prior_name =
            cfg.gamma_prior.is_pc
                ? "PC(" + format_double(cfg.gamma_prior.u) + "," +
                      format_double(cfg.gamma_prior.a) + ")"
                : "Uniform";
        summary << cfg.scenario << "," << cfg.size_level << "," << prior_name
                << "," << format_double(h_true.gamma) << "," << cfg.replicates
                << "," << format_double(mean_g) << "," << format_double(sd_g)
                << "," << format_double(sum_p / n) << ","
                << format_double(sum_t / n) << "\n";
        write_file(dir / "replicates.csv", reps.str());
        write_file(dir / "summary.csv", summary.str());
        write_manifest(dir, "simulate", ov, config_text, cfg.mcmc.seed,
                       {"replicates.csv", "summary.csv"});
        std::cout << summary.str();
        return kExitOk;
    } catch (const VpError& e) {
        std::cerr << "vpmap simulate: " << e.what() << "\n";
        return exit_code_for(stage);
    }
}

// -------------------------------------------------------- verify-prior ----

int cmd_verify_prior(const Overrides& ov) {
    Stage stage = Stage::config;
    try {
        std::string config_text = "{\"version\": 1}";
        if (!ov.config_path.empty()) config_text = read_text_file(ov.config_path);
        VerifyPriorConfig cfg = parse_verify_config(config_text);
        if (ov.out_dir) cfg.out_dir = *ov.out_dir;

        stage = Stage::data;
        AdjacencyGraph graph;
        if (!cfg.graph_path.empty()) graph = parse_graph_file(cfg.graph_path);

        stage = Stage::compute;
        std::vector<VerifyConfig> configs;
        for (InteractionType type : cfg.types)
            for (int order : cfg.orders)
                for (bool iid : cfg.with_iid) {
                    VerifyConfig c;
                    c.type = type;
                    c.n1 = cfg.n1;
                    c.n2 = cfg.n2;
                    c.temporal_order = order;
                    c.phi = cfg.phi;
                    if (iid) c.iid_psi = {cfg.psi1, cfg.psi2};
                    c.graph = graph;
                    configs.push_back(c);
                }
        // The report grid/gamma0 follow the config.
        VerifyResult result;
        result.pass = true;
        for (const auto& vc : configs) {
            AdjacencyGraph g = vc.graph;
            if (g.n_areas == 0) {
                std::vector<std::pair<int, int>> edges;
                for (int j = 0; j + 1 < vc.n2; ++j) edges.emplace_back(j, j + 1);
                g = make_graph(vc.n2, std::move(edges));
            }
            const StructureMatrix r1 =
                scale_structure(rw_structure(vc.n1, vc.temporal_order));
            const StructureMatrix r2 = scale_structure(icar_structure(g));
            KldReport rep = distance_curve(vc.type, r1, r2, vc.phi, vc.iid_psi,
                                           cfg.gamma0, cfg.grid);
            result.pass = result.pass && rep.pass();
            result.reports.push_back(std::move(rep));
        }

        std::ostringstream curve, summary;
        curve << "type,n1,n2,order,with_iid,gamma,distance,ratio\n";
        summary << "type,n1,n2,order,with_iid,m,expected_constant,"
                   "fitted_constant,rel_spread,m_differs_from_rank,pass\n";
        for (const auto& rep : result.reports) {
            for (std::size_t k = 0; k < rep.grid.size(); ++k) {
                curve << to_string(rep.type) << "," << rep.n1 << "," << rep.n2
                      << "," << rep.temporal_order << ","
                      << (rep.with_iid ? 1 : 0) << ","
                      << format_double(rep.grid[k]) << ","
                      << format_double(rep.distances[k]) << ","
                      << format_double(rep.distances[k] /
                                       std::sqrt(rep.grid[k]))
                      << "\n";
            }
            summary << to_string(rep.type) << "," << rep.n1 << "," << rep.n2
                    << "," << rep.temporal_order << ","
                    << (rep.with_iid ? 1 : 0) << "," << rep.m_spectral << ","
                    << format_double(rep.expected_constant) << ","
                    << format_double(rep.dominant_constant) << ","
                    << format_double(rep.ratio_rel_spread) << ","
                    << (rep.m_differs_from_rank ? 1 : 0) << ","
                    << (rep.pass() ? 1 : 0) << "\n";
            std::cout << (rep.pass() ? "[PASS] " : "[FAIL] ") << "type "
                      << to_string(rep.type) << " rw" << rep.temporal_order
                      << (rep.with_iid ? " +iid" : "") << ": spread "
                      << rep.ratio_rel_spread << ", constant "
                      << rep.dominant_constant << " vs expected "
                      << rep.expected_constant << "\n";
        }
        if (!cfg.out_dir.empty()) {
            fs::create_directories(cfg.out_dir);
            const fs::path dir(cfg.out_dir);
            write_file(dir / "kld_curve.csv", curve.str());
            write_file(dir / "kld_summary.csv", summary.str());
            write_manifest(dir, "verify-prior", ov, config_text, 0,
                           {"kld_curve.csv", "kld_summary.csv"});
        }
        std::cout << (result.pass ? "verify-prior: all configurations pass\n"
                                  : "verify-prior: FAILURES detected\n");
        return result.pass ? kExitOk : kExitVerifyFailed;
    } catch (const VpError& e) {
        std::cerr << "vpmap verify-prior: " << e.what() << "\n";
        return exit_code_for(stage);
    }
}

// --------------------------------------------------------------- scale ----

int cmd_scale(const Overrides& ov) {
    Stage stage = Stage::config;
    try {
        const std::string config_text = read_text_file(ov.config_path);
        ScaleConfig cfg = parse_scale_config(config_text);
        if (ov.out_dir) cfg.out_dir = *ov.out_dir;

        stage = Stage::data;
        StructureMatrix R;
        std::string label;
        if (cfg.kind == "rw1" || cfg.kind == "rw2") {
            stage = Stage::compute;
            R = rw_structure(cfg.n, cfg.kind == "rw1" ? 1 : 2);
            label = cfg.kind + " n=" + std::to_string(cfg.n);
        } else {
            const AdjacencyGraph g = parse_graph_file(cfg.graph_path);
            stage = Stage::compute;
            R = icar_structure(g);
            label = "icar n=" + std::to_string(g.n_areas) + " components=" +
                    std::to_string(g.n_components());
        }

        // Per-component report for disconnected ICAR graphs (a global
        // generalized variance is undefined when singletons are present).
        json rep;
        rep["structure"] = label;
        const SpectralDecomposition sd_before = spectral(R);
        std::ostringstream out;
        out << "structure: " << label << "\n";
        if (R.kind == StructureKind::icar && R.components.size() > 1) {
            json comps = json::array();
            for (std::size_t c = 0; c < R.components.size(); ++c) {
                const auto& comp = R.components[c];
                json jc;
                jc["component"] = c + 1;
                jc["size"] = comp.size();
                if (comp.size() > 1) {
                    const int m = static_cast<int>(comp.size());
                    Eigen::MatrixXd block(m, m);
                    for (int a = 0; a < m; ++a)
                        for (int b = 0; b < m; ++b)
                            block(a, b) = R.entries(comp[a], comp[b]);
                    jc["gv_before"] = generalized_variance(block);
                } else {
                    jc["gv_before"] = nullptr; // singleton: pinned at zero
                }
                comps.push_back(jc);
                out << "component " << (c + 1) << " size " << comp.size();
                if (comp.size() > 1)
                    out << " gv_before " << format_double(
                               jc["gv_before"].get<double>());
                else
                    out << " (singleton: structured effect pinned at 0)";
                out << "\n";
            }
            rep["components"] = comps;
        } else {
            const double gv = generalized_variance(R);
            rep["gv_before"] = gv;
            out << "gv_before: " << format_double(gv) << "\n";
        }

        const StructureMatrix scaled = scale_structure(R);
        // Verify the scaling on the scaled matrix itself.
        double gv_after = 1.0;
        if (!(scaled.kind == StructureKind::icar &&
              scaled.components.size() > 1 &&
              std::any_of(scaled.components.begin(), scaled.components.end(),
                          [](const auto& c) { return c.size() == 1; })))
            gv_after = generalized_variance(scaled);
        rep["gv_after"] = gv_after;
        rep["rank"] = sd_before.rank;
        rep["null_dim"] = sd_before.null_dim();
        out << "gv_after: " << format_double(gv_after) << "\n";
        out << "rank: " << sd_before.rank << "\n";
        out << "null_dim: " << sd_before.null_dim() << "\n";
        std::cout << out.str();

        if (!cfg.out_dir.empty()) {
            fs::create_directories(cfg.out_dir);
            const fs::path dir(cfg.out_dir);
            std::vector<std::string> outputs = {"scale_report.json"};
            write_file(dir / "scale_report.json", rep.dump(2) + "\n");
            if (cfg.dump_matrix) {
                std::ostringstream mat;
                for (int i = 0; i < scaled.order(); ++i) {
                    for (int j = 0; j < scaled.order(); ++j) {
                        if (j) mat << ",";
                        mat << format_double(scaled.entries(i, j));
                    }
                    mat << "\n";
                }
                write_file(dir / "scaled_matrix.csv", mat.str());
                outputs.push_back("scaled_matrix.csv");
            }
            write_manifest(dir, "scale", ov, config_text, 0, outputs);
        } else if (cfg.dump_matrix) {
            for (int i = 0; i < scaled.order(); ++i) {
                for (int j = 0; j < scaled.order(); ++j) {
                    if (j) std::cout << ",";
                    std::cout << format_double(scaled.entries(i, j));
                }
                std::cout << "\n";
            }
        }
        return kExitOk;
    } catch (const VpError& e) {
        std::cerr << "vpmap scale: " << e.what() << "\n";
        return exit_code_for(stage);
    }
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"variance-partitioning spatio-temporal disease mapping"};
    app.require_subcommand(1);

    std::string config_path;
    std::int64_t seed = -1;
    std::string out_dir;
    int jobs = 0;
    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path,
                                    "path to the JSON run configuration");
        if (config_required) opt->required();
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--jobs", jobs, "parallel worker slots");
    };

    CLI::App* fit = app.add_subcommand("fit", "fit the model to a dataset");
    add_common(fit, true);
    CLI::App* sim =
        app.add_subcommand("simulate", "scenario recovery study");
    add_common(sim, true);
    CLI::App* verify = app.add_subcommand(
        "verify-prior", "numerical check of the sqrt(gamma) distance law");
    add_common(verify, false);
    CLI::App* scale =
        app.add_subcommand("scale", "report structure scaling diagnostics");
    add_common(scale, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            app.exit(e);
            return kExitOk;
        }
        std::cerr << "vpmap: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "vpmap: " << e.what() << "\n";
        return kExitConfig;
    }

    Overrides ov;
    ov.config_path = config_path;
    if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) ov.out_dir = out_dir;
    if (jobs > 0) ov.jobs = jobs;

    try {
        if (fit->parsed()) return cmd_fit(ov);
        if (sim->parsed()) return cmd_simulate(ov);
        if (verify->parsed()) return cmd_verify_prior(ov);
        if (scale->parsed()) return cmd_scale(ov);
    } catch (const VpError& e) {
        std::cerr << "vpmap: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "vpmap: internal error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}

} // namespace vpmap::cli
