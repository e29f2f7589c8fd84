#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedsched {

// Flat key = value experiment configuration. Keys are the conventional symbol
// names (mu, a, t_cm, P_cm, E_tr, t_tot, E_tot, N, rho, eta, ...), one per
// line, '#' starts a comment.
struct ExperimentConfig {
    // model / training
    std::string model = "svm";  // svm | logloss | mse
    double eta = 0.05;
    double l2 = 0.0;
    std::string init = "zeros";  // zeros | gaussian
    double init_std = 0.1;

    // dataset
    std::string dataset = "synthetic";  // synthetic | idx
    std::uint64_t n_samples = 600;
    std::uint64_t dim = 8;
    double separation = 2.0;
    std::string idx_images;
    std::string idx_labels;
    std::uint64_t subset = 0;  // 0 = all
    double holdout = 0.2;

    // partition
    std::uint64_t N = 5;
    std::string partition = "iid";  // iid | label-sorted
    std::uint64_t seed = 1;

    // bound / objective constants
    double rho = 3.0;
    double grad_f_star = 3.0;
    double epsilon = 0.0;  // 0 = use the measured gap in bound reports
    double tau_max = 12.0;
    double eps_target = 0.01;

    // resource model
    double mu = 10.0;
    double a = 0.05;
    bool heterogeneous_a = false;
    double t_cm = 2.0;
    double P_cm = 1.5;
    double E_tr = 0.5;
    double kappa = 0.0;
    double C = 0.0;
    double D_max = 0.0;
    double B = 0.0;
    double N0 = 0.0;
    double Z = 0.0;
    std::vector<double> h;  // per-client channel gains
    double t_tot = 240.0;
    double E_tot = 90.0;

    // schedule / run
    std::uint64_t tau = 4;
    std::uint64_t K = 0;  // 0 = largest K that fits the budgets
    std::vector<long long> sweep_taus = {1, 2, 3, 4, 5, 6, 8, 10, 12};
    std::string delay_model = "expected";  // expected | sampled

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses config text; throws std::runtime_error with the offending line on
// unknown keys or malformed values.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::string& path);

// Canonical serialization: every key in declaration order, doubles with full
// round-trip precision. parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// Cross-field checks (positive values where required, referenced files exist).
void validate_config(const ExperimentConfig& cfg);

}  // namespace fedsched
