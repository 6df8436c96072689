#include "vpmap/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vpmap/errors.hpp"

namespace vpmap {

using nlohmann::json;

double SimulateConfig::gamma_true() const {
    if (scenario == "SC1") return 0.0;
    if (scenario == "SC2") return 0.1;
    if (scenario == "SC3") return 1.0 / 3.0;
    if (scenario == "SC4") return 2.0 / 3.0;
    fail(ErrorCode::config, "unknown scenario '" + scenario + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

[[noreturn]] void cfg_fail(const std::string& path, const std::string& what) {
    fail(ErrorCode::config, "config error at " + path + ": " + what);
}

json parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorCode::config, "config root must be an object");
    return j;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) cfg_fail(path, "unknown key '" + it.key() + "'");
    }
}

const json& need(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) cfg_fail(path, "missing required key '" + std::string(key) + "'");
    return *it;
}

const json* maybe(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

void check_version(const json& j, const std::string& path) {
    const json& v = need(j, path, "version");
    if (!v.is_number_integer() || v.get<long>() != 1)
        cfg_fail(path + ".version", "this tool reads config version 1");
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) cfg_fail(path, "expected a number");
    return j.get<double>();
}

double get_number_in(const json& j, const std::string& path, double lo,
                     double hi, bool open) {
    const double v = get_number(j, path);
    const bool ok = open ? (v > lo && v < hi) : (v >= lo && v <= hi);
    if (!ok)
        cfg_fail(path, "value " + std::to_string(v) + " outside " +
                           (open ? "(" : "[") + std::to_string(lo) + ", " +
                           std::to_string(hi) + (open ? ")" : "]"));
    return v;
}

long get_integer(const json& j, const std::string& path, long lo, long hi) {
    if (!j.is_number_integer()) cfg_fail(path, "expected an integer");
    const long v = j.get<long>();
    if (v < lo || v > hi)
        cfg_fail(path, "value " + std::to_string(v) + " outside [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) cfg_fail(path, "expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) cfg_fail(path, "expected a boolean");
    return j.get<bool>();
}

PriorChoice get_prior_choice(const json& j, const std::string& path,
                             bool allow_uniform) {
    if (!j.is_object()) cfg_fail(path, "expected a prior object");
    check_keys(j, path, {"type", "U", "a"});
    const std::string type = get_string(need(j, path, "type"), path + ".type");
    PriorChoice p;
    if (type == "uniform") {
        if (!allow_uniform) cfg_fail(path, "this hyperparameter requires a pc prior");
        if (maybe(j, "U") || maybe(j, "a"))
            cfg_fail(path, "uniform prior takes no U or a");
        p.is_pc = false;
        return p;
    }
    if (type != "pc") cfg_fail(path + ".type", "expected 'pc' or 'uniform'");
    p.is_pc = true;
    p.u = get_number_in(need(j, path, "U"), path + ".U", 0.0, 1.0, true);
    p.a = get_number_in(need(j, path, "a"), path + ".a", 0.0, 1.0, true);
    return p;
}

void get_tau_prior(const json& j, const std::string& path, double& u, double& a) {
    if (!j.is_object()) cfg_fail(path, "expected a prior object");
    check_keys(j, path, {"type", "U", "a"});
    if (get_string(need(j, path, "type"), path + ".type") != "pc")
        cfg_fail(path + ".type", "tau takes a pc prior");
    u = get_number(need(j, path, "U"), path + ".U");
    if (!(u > 0.0)) cfg_fail(path + ".U", "tau prior needs U > 0");
    a = get_number_in(need(j, path, "a"), path + ".a", 0.0, 1.0, true);
}

void get_uniform_only(const json& j, const std::string& path) {
    if (!j.is_object()) cfg_fail(path, "expected a prior object");
    check_keys(j, path, {"type"});
    if (get_string(need(j, path, "type"), path + ".type") != "uniform")
        cfg_fail(path, "only a uniform prior is supported here");
}

McmcConfig get_mcmc(const json& j, const std::string& path) {
    if (!j.is_object()) cfg_fail(path, "expected an object");
    check_keys(j, path,
               {"iterations", "burn_in", "thin", "chains", "seed",
                "store_latent", "store_pointwise", "alpha_prior_sd"});
    McmcConfig m;
    m.n_iterations = get_integer(need(j, path, "iterations"),
                                 path + ".iterations", 1, 100000000L);
    m.burn_in = get_integer(need(j, path, "burn_in"), path + ".burn_in", 0,
                            m.n_iterations - 1);
    if (const json* p = maybe(j, "thin"))
        m.thin = get_integer(*p, path + ".thin", 1, 1000000L);
    if (const json* p = maybe(j, "chains"))
        m.n_chains = static_cast<int>(get_integer(*p, path + ".chains", 1, 64));
    if (const json* p = maybe(j, "seed"))
        m.seed = static_cast<std::uint64_t>(
            get_integer(*p, path + ".seed", 0, 9007199254740992L));
    if (const json* p = maybe(j, "store_latent"))
        m.store_latent = get_bool(*p, path + ".store_latent");
    if (const json* p = maybe(j, "store_pointwise"))
        m.store_pointwise = get_bool(*p, path + ".store_pointwise");
    if (const json* p = maybe(j, "alpha_prior_sd")) {
        m.alpha_prior_sd = get_number(*p, path + ".alpha_prior_sd");
        if (!(m.alpha_prior_sd > 0.0))
            cfg_fail(path + ".alpha_prior_sd", "must be positive");
    }
    return m;
}

InteractionType get_interaction(const json& j, const std::string& path) {
    const std::string s = get_string(j, path);
    try {
        return interaction_type_from_string(s);
    } catch (const VpError&) {
        cfg_fail(path, "expected one of I, II, III, IV");
    }
}

std::string get_out_dir(const json& j, const std::string& fallback) {
    if (const json* out = maybe(j, "output")) {
        if (!out->is_object()) cfg_fail("output", "expected an object");
        check_keys(*out, "output", {"dir"});
        return get_string(need(*out, "output", "dir"), "output.dir");
    }
    return fallback;
}

} // namespace

FitConfig parse_fit_config(const std::string& json_text) {
    const json j = parse_document(json_text);
    check_keys(j, "$", {"version", "model", "priors", "mcmc", "inputs", "output"});
    check_version(j, "$");

    FitConfig c;
    const json& model = need(j, "$", "model");
    if (!model.is_object()) cfg_fail("model", "expected an object");
    check_keys(model, "model",
               {"family", "temporal_order", "interaction_type",
                "include_iid_main"});
    const std::string fam =
        get_string(need(model, "model", "family"), "model.family");
    if (fam != "binomial" && fam != "poisson")
        cfg_fail("model.family", "expected 'binomial' or 'poisson'");
    c.family = family_from_string(fam);
    c.temporal_order = static_cast<int>(get_integer(
        need(model, "model", "temporal_order"), "model.temporal_order", 1, 2));
    c.interaction_type = get_interaction(
        need(model, "model", "interaction_type"), "model.interaction_type");
    if (const json* p = maybe(model, "include_iid_main"))
        c.include_iid_main = get_bool(*p, "model.include_iid_main");

    const json& priors = need(j, "$", "priors");
    if (!priors.is_object()) cfg_fail("priors", "expected an object");
    check_keys(priors, "priors", {"gamma", "tau", "phi", "psi1", "psi2"});
    c.gamma_prior =
        get_prior_choice(need(priors, "priors", "gamma"), "priors.gamma", true);
    get_tau_prior(need(priors, "priors", "tau"), "priors.tau", c.tau_u, c.tau_a);
    if (const json* p = maybe(priors, "phi")) get_uniform_only(*p, "priors.phi");
    if (const json* p = maybe(priors, "psi1")) get_uniform_only(*p, "priors.psi1");
    if (const json* p = maybe(priors, "psi2")) get_uniform_only(*p, "priors.psi2");

    c.mcmc = get_mcmc(need(j, "$", "mcmc"), "mcmc");

    const json& inputs = need(j, "$", "inputs");
    if (!inputs.is_object()) cfg_fail("inputs", "expected an object");
    check_keys(inputs, "inputs", {"data", "graph"});
    c.data_path = get_string(need(inputs, "inputs", "data"), "inputs.data");
    c.graph_path = get_string(need(inputs, "inputs", "graph"), "inputs.graph");

    c.out_dir = get_out_dir(j, c.out_dir);
    return c;
}

SimulateConfig parse_simulate_config(const std::string& json_text) {
    const json j = parse_document(json_text);
    check_keys(j, "$",
               {"version", "scenario", "generator", "priors", "mcmc", "output",
                "jobs"});
    check_version(j, "$");

    SimulateConfig c;
    const json& sc = need(j, "$", "scenario");
    if (!sc.is_object()) cfg_fail("scenario", "expected an object");
    check_keys(sc, "scenario", {"name", "size_level", "gamma_prior", "replicates"});
    c.scenario = get_string(need(sc, "scenario", "name"), "scenario.name");
    if (c.scenario != "SC1" && c.scenario != "SC2" && c.scenario != "SC3" &&
        c.scenario != "SC4")
        cfg_fail("scenario.name", "expected one of SC1, SC2, SC3, SC4");
    c.size_level =
        get_string(need(sc, "scenario", "size_level"), "scenario.size_level");
    if (c.size_level != "actual" && c.size_level != "smaller" &&
        c.size_level != "larger")
        cfg_fail("scenario.size_level", "expected actual, smaller, or larger");
    c.gamma_prior = get_prior_choice(need(sc, "scenario", "gamma_prior"),
                                     "scenario.gamma_prior", true);
    if (const json* p = maybe(sc, "replicates"))
        c.replicates =
            static_cast<int>(get_integer(*p, "scenario.replicates", 1, 10000));

    const json& gen = need(j, "$", "generator");
    if (!gen.is_object()) cfg_fail("generator", "expected an object");
    check_keys(gen, "generator",
               {"n1", "lattice", "graph", "base_population", "temporal_order",
                "interaction_type", "effects"});
    c.n1 = static_cast<int>(
        get_integer(need(gen, "generator", "n1"), "generator.n1", 3, 1000));
    if (const json* p = maybe(gen, "lattice")) {
        if (!p->is_array() || p->size() != 2)
            cfg_fail("generator.lattice", "expected [rows, cols]");
        c.lattice_rows =
            static_cast<int>(get_integer((*p)[0], "generator.lattice[0]", 1, 1000));
        c.lattice_cols =
            static_cast<int>(get_integer((*p)[1], "generator.lattice[1]", 1, 1000));
    }
    if (const json* p = maybe(gen, "graph"))
        c.graph_path = get_string(*p, "generator.graph");
    if (const json* p = maybe(gen, "base_population")) {
        c.base_population = get_number(*p, "generator.base_population");
        if (!(c.base_population >= 1.0))
            cfg_fail("generator.base_population", "must be >= 1");
    }
    if (const json* p = maybe(gen, "temporal_order"))
        c.temporal_order =
            static_cast<int>(get_integer(*p, "generator.temporal_order", 1, 2));
    if (const json* p = maybe(gen, "interaction_type"))
        c.interaction_type = get_interaction(*p, "generator.interaction_type");
    if (const json* p = maybe(gen, "effects"))
        c.effects = get_string(*p, "generator.effects");

    if (const json* priors = maybe(j, "priors")) {
        if (!priors->is_object()) cfg_fail("priors", "expected an object");
        check_keys(*priors, "priors", {"tau"});
        if (const json* p = maybe(*priors, "tau"))
            get_tau_prior(*p, "priors.tau", c.tau_u, c.tau_a);
    }
    c.mcmc = get_mcmc(need(j, "$", "mcmc"), "mcmc");
    if (const json* p = maybe(j, "jobs"))
        c.jobs = static_cast<int>(get_integer(*p, "jobs", 1, 256));
    c.out_dir = get_out_dir(j, c.out_dir);
    return c;
}

VerifyPriorConfig parse_verify_config(const std::string& json_text) {
    const json j = parse_document(json_text);
    check_keys(j, "$", {"version", "verify", "output"});
    check_version(j, "$");

    VerifyPriorConfig c;
    if (const json* v = maybe(j, "verify")) {
        if (!v->is_object()) cfg_fail("verify", "expected an object");
        check_keys(*v, "verify",
                   {"types", "n1", "n2", "orders", "with_iid", "phi", "psi1",
                    "psi2", "gamma0", "grid", "graph"});
        if (const json* p = maybe(*v, "types")) {
            if (!p->is_array() || p->empty())
                cfg_fail("verify.types", "expected a non-empty array");
            c.types.clear();
            for (std::size_t k = 0; k < p->size(); ++k)
                c.types.push_back(get_interaction(
                    (*p)[k], "verify.types[" + std::to_string(k) + "]"));
        }
        if (const json* p = maybe(*v, "n1"))
            c.n1 = static_cast<int>(get_integer(*p, "verify.n1", 3, 100));
        if (const json* p = maybe(*v, "n2"))
            c.n2 = static_cast<int>(get_integer(*p, "verify.n2", 2, 100));
        if (const json* p = maybe(*v, "orders")) {
            if (!p->is_array() || p->empty())
                cfg_fail("verify.orders", "expected a non-empty array");
            c.orders.clear();
            for (std::size_t k = 0; k < p->size(); ++k)
                c.orders.push_back(static_cast<int>(get_integer(
                    (*p)[k], "verify.orders[" + std::to_string(k) + "]", 1, 2)));
        }
        if (const json* p = maybe(*v, "with_iid")) {
            if (!p->is_array() || p->empty())
                cfg_fail("verify.with_iid", "expected a non-empty array");
            c.with_iid.clear();
            for (std::size_t k = 0; k < p->size(); ++k)
                c.with_iid.push_back(get_bool(
                    (*p)[k], "verify.with_iid[" + std::to_string(k) + "]"));
        }
        if (const json* p = maybe(*v, "phi"))
            c.phi = get_number_in(*p, "verify.phi", 0.0, 1.0, true);
        if (const json* p = maybe(*v, "psi1"))
            c.psi1 = get_number_in(*p, "verify.psi1", 0.0, 1.0, true);
        if (const json* p = maybe(*v, "psi2"))
            c.psi2 = get_number_in(*p, "verify.psi2", 0.0, 1.0, true);
        if (const json* p = maybe(*v, "gamma0")) {
            c.gamma0 = get_number(*p, "verify.gamma0");
            if (!(c.gamma0 > 0.0 && c.gamma0 <= 1e-4))
                cfg_fail("verify.gamma0", "must lie in (0, 1e-4]");
        }
        if (const json* p = maybe(*v, "grid")) {
            if (!p->is_array() || p->empty())
                cfg_fail("verify.grid", "expected a non-empty array");
            c.grid.clear();
            double prev = 0.0;
            for (std::size_t k = 0; k < p->size(); ++k) {
                const double g = get_number_in(
                    (*p)[k], "verify.grid[" + std::to_string(k) + "]", 0.0, 1.0,
                    true);
                if (g <= prev)
                    cfg_fail("verify.grid", "values must be strictly increasing");
                prev = g;
                c.grid.push_back(g);
            }
        }
        if (const json* p = maybe(*v, "graph"))
            c.graph_path = get_string(*p, "verify.graph");
    }
    c.out_dir = get_out_dir(j, c.out_dir);
    return c;
}

ScaleConfig parse_scale_config(const std::string& json_text) {
    const json j = parse_document(json_text);
    check_keys(j, "$", {"version", "structure", "output"});
    check_version(j, "$");

    ScaleConfig c;
    const json& s = need(j, "$", "structure");
    if (!s.is_object()) cfg_fail("structure", "expected an object");
    check_keys(s, "structure", {"kind", "n", "graph", "dump_matrix"});
    c.kind = get_string(need(s, "structure", "kind"), "structure.kind");
    if (c.kind == "rw1" || c.kind == "rw2") {
        c.n = static_cast<int>(
            get_integer(need(s, "structure", "n"), "structure.n", 3, 100000));
        if (maybe(s, "graph"))
            cfg_fail("structure.graph", "rw structures take no graph");
    } else if (c.kind == "icar") {
        c.graph_path =
            get_string(need(s, "structure", "graph"), "structure.graph");
        if (maybe(s, "n")) cfg_fail("structure.n", "icar reads n from the graph");
    } else {
        cfg_fail("structure.kind", "expected rw1, rw2, or icar");
    }
    if (const json* p = maybe(s, "dump_matrix"))
        c.dump_matrix = get_bool(*p, "structure.dump_matrix");
    c.out_dir = get_out_dir(j, "");
    return c;
}

} // namespace vpmap
