#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vpmap/interaction.hpp"
#include "vpmap/mcmc.hpp"
#include "vpmap/model.hpp"

namespace vpmap {

// Declared prior for a (0,1)-valued hyperparameter: PC(U, a) or Uniform.
struct PriorChoice {
    bool is_pc = true;
    double u = 0.5;
    double a = 0.99;
};

struct FitConfig {
    Family family = Family::binomial;
    int temporal_order = 1;
    InteractionType interaction_type = InteractionType::IV;
    bool include_iid_main = false;
    PriorChoice gamma_prior;
    double tau_u = 1.0 / 0.31;
    double tau_a = 0.01;
    McmcConfig mcmc;
    std::string data_path;
    std::string graph_path;
    std::string out_dir = "out";
};

// Appendix-style scenario harness: fixed tau = 1, phi = 0.5 in the
// generator, gamma set by the scenario, population scaled by the size level.
struct SimulateConfig {
    std::string scenario = "SC3"; // SC1..SC4
    std::string size_level = "actual"; // actual | smaller | larger
    PriorChoice gamma_prior;
    int replicates = 10;
    int n1 = 10;
    int lattice_rows = 3;
    int lattice_cols = 5;
    std::string graph_path; // overrides the lattice when set
    double base_population = 500.0;
    int temporal_order = 1;
    InteractionType interaction_type = InteractionType::IV;
    std::string effects = "prior"; // "prior" or a latent-effects CSV path
    double tau_u = 1.0 / 0.31;
    double tau_a = 0.01;
    McmcConfig mcmc;
    std::string out_dir = "out";
    int jobs = 1;

    double gamma_true() const;
};

struct VerifyPriorConfig {
    std::vector<InteractionType> types = {InteractionType::I, InteractionType::II,
                                          InteractionType::III,
                                          InteractionType::IV};
    int n1 = 4;
    int n2 = 4;
    std::vector<int> orders = {1, 2};
    std::vector<bool> with_iid = {false, true};
    double phi = 0.5;
    double psi1 = 0.3;
    double psi2 = 0.6;
    double gamma0 = 1e-6;
    std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::string graph_path; // empty -> path graph on n2 nodes
    std::string out_dir = "out";
};

struct ScaleConfig {
    std::string kind = "rw1"; // rw1 | rw2 | icar
    int n = 3;                // rw order n
    std::string graph_path;   // icar graph
    bool dump_matrix = false;
    std::string out_dir;      // empty -> stdout only
};

// Parses and validates a config document (strict: unknown keys rejected,
// version required). Throws VpError(ErrorCode::config) on any violation.
FitConfig parse_fit_config(const std::string& json_text);
SimulateConfig parse_simulate_config(const std::string& json_text);
VerifyPriorConfig parse_verify_config(const std::string& json_text);
ScaleConfig parse_scale_config(const std::string& json_text);

std::string read_text_file(const std::string& path);

// FNV-1a hash of the raw config bytes, for the run manifest.
std::string fnv1a_hex(const std::string& bytes);

} // namespace vpmap
