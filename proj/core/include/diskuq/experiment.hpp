#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diskuq/mcmc.hpp"

namespace diskuq {

/// Experiment configuration, loaded from JSON. All seeds are explicit.
struct ExperimentConfig {
    std::string model = "xray";  // "xray" | "schrodinger"
    std::string truth = "phi";   // preset tag
    std::size_t n_observations = 600;
    double sigma = 0.1;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // prior
    MaternConfig prior;
    bool prior_rescale = true;

    // chain
    ChainConfig chain;
    std::string init = "truth";  // "truth" | "prior_draw" | "zero"
    std::vector<std::string> tracked = {"psi1", "psi2", "psi3"};

    // discretizations
    int mesh_rings = 17;
    double ode_h = 0.05;
    int schrodinger_n = 47;

    // variance quadrature (x-ray spectral path)
    int variance_max_degree = 10;
    int variance_n_phi = 96;
    int variance_n_vphi = 48;
    double variance_ode_h = 0.02;
    double variance_tol = 1e-6;

    // coverage study
    int coverage_m = 50;
    double coverage_xi = 0.1;
    std::size_t coverage_n = 300;
    int coverage_chain_steps = 10000;
    int coverage_mesh_rings = 9;

    double credible_xi = 0.05;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_canonical_json(const ExperimentConfig& cfg);
/// FNV-1a hash of the canonical JSON, for provenance stamps.
std::string config_hash(const ExperimentConfig& cfg);

/// Validates semantic constraints (positive sizes, known tags); throws
/// std::invalid_argument with a message on violation.
void validate_config(const ExperimentConfig& cfg);

/// Subcommand drivers; each writes its artifacts under cfg.output_dir and
/// returns 0 on success. Configuration errors surface as
/// std::invalid_argument (exit 1 at the CLI), runtime failures as other
/// exceptions (exit 2).
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_sample(const ExperimentConfig& cfg);
int cmd_variance(const ExperimentConfig& cfg);
int cmd_coverage(const ExperimentConfig& cfg);
int cmd_diagnose(const ExperimentConfig& cfg);

}  // namespace diskuq
