#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "winrestart/vec.hpp"

namespace winrestart {

// Full experiment description as read from a key = value config file.
// Command-line flags override individual fields after parsing.
struct ExperimentConfig {
    // problem
    int n = 3;
    double rho = 10.0;
    // system coefficients; gamma is given either directly or through the
    // oscillation rule (gamma_i, gamma_eps) - exactly one of the two.
    double alpha = 3.0;
    double beta = 6.0;
    std::optional<double> gamma;
    std::optional<int> gamma_i = 2;
    std::optional<double> gamma_eps = 0.1;
    // mode
    std::string mode = "continuous";  // continuous | discrete
    std::string policy = "speed";     // discrete runs: none | speed | warmstart
    // continuous options
    double horizon = 5.0;
    double h_ode = 1e-4;
    double event_tol = 1e-8;
    double grad_tol = 1e-13;
    bool baseline = false;  // also integrate without restarts
    // discrete options
    double h = 1e-3;
    int iters = 3000;
    // analysis and output
    std::string fit_mode = "all";  // all | restarts
    // regression window in t (continuous) or k (discrete); absent = full run
    std::optional<double> fit_lo;
    std::optional<double> fit_hi;
    std::string out_dir = "out";
    std::string format = "csv";  // csv | json
    std::uint64_t seed = 0;
    Vec z0 = {1.0, 1.0, 1.0};
};

// Parses key = value lines ('#' starts a comment). Unknown keys and
// malformed values raise ConfigError naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(cfg)) reproduces cfg exactly.
std::string serialize_config(const ExperimentConfig& cfg);

// Field-by-field validation; raises ConfigError naming the first bad field.
void validate_config(const ExperimentConfig& cfg);

// The gamma actually used by the run; applies the oscillation rule when
// gamma is not given directly.
double resolved_gamma(const ExperimentConfig& cfg);

}  // namespace winrestart
