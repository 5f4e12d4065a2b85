// Experiment configuration: one JSON file drives every subcommand. Only
// --seed and --out may override fields from the command line, keeping
// provenance trivial. The config hash covers the experiment definition;
// execution details (thread count, output directory) are excluded so
// identical experiments produce byte-identical outputs on any machine
// layout.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fshe/covariance.hpp"
#include "fshe/solver.hpp"
#include "fshe/spectral.hpp"

namespace fshe::config {

struct U0Spec {
    std::string kind = "constant";  // constant | cosine
    double value = 1.0;

    Eigen::VectorXd grid_values(const spectral::SpectralBasis& b) const;
};

struct ScanSettings {
    std::vector<double> xi_list;      // defaults to 12 geometric points in [0.05, 8]
    double T = 2.0;
    double window_lo = 1.0;
    double window_hi = 2.0;
    double x = 0.0;
    double dt_max = 0.0025;           // renewal step cap; scaled down with growth
};

struct ChaosSettings {
    std::vector<double> t_grid;       // defaults to 8 geometric points in [0.004, 0.032]
    int n_max = 2;
    double x = 0.0;
    std::vector<std::uint64_t> samples{10000000, 40000000, 2000000};  // per order
    double lambda_cell = 0.0;         // 0 -> basis cell width
};

struct ExperimentConfig {
    double alpha = 2.0;
    int N = 64;
    int M = 256;

    double xi = 1.0;
    covariance::SpatialKernel spatial = covariance::SpatialKernel::make_riesz(0.5);
    covariance::TemporalKernel temporal = covariance::TemporalKernel::make_white();

    solver::SigmaSpec sigma = solver::SigmaSpec::identity();
    U0Spec u0;
    double epsilon = 0.25;

    double dt = 0.005;
    double T = 1.0;
    std::vector<double> t_points{0.25, 0.5, 1.0};
    std::vector<double> x_points{-0.5, 0.0, 0.5};
    std::vector<double> p_list{2.0};
    int replicates = 10000;

    std::uint64_t seed = 1;
    int threads = 0;          // excluded from the hash
    std::string out_dir = "out";  // excluded from the hash

    ScanSettings scan;
    ChaosSettings chaos;

    // FNV-1a over the canonical serialization of the hashed fields.
    std::string hash() const;
    // steps_for / snapshot helpers
    int steps() const;
    std::vector<int> t_steps() const;  // t_points as step indices (validated multiples)
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Throws std::invalid_argument with a machine-readable message on failure
// (Dalang check, assumption validation, grid consistency).
void validate(const ExperimentConfig& cfg);

}  // namespace fshe::config
