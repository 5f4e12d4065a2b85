// Pathwise exponential-Euler stepping of the mild solution for white-in-time
// noise: one step maps the spectral state a to
//     a' = E_dt (a + xi * P[sigma(u) . dW]),   u = Phi a,
// with E_dt the diagonal semigroup over one step, P the quadrature
// projection onto the retained modes, and sigma evaluated at the left
// endpoint (Ito consistency; trapezoidal evaluation would add a spurious
// Stratonovich drift).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fshe/covariance.hpp"
#include "fshe/noise.hpp"
#include "fshe/rng.hpp"
#include "fshe/spectral.hpp"

namespace fshe::solver {

enum class SigmaKind { identity, linear, sine_perturbed };

struct SigmaSpec {
    SigmaKind kind = SigmaKind::identity;
    double lambda = 0.0;
    double l_sigma = 1.0;  // declared lower growth constant
    double L_sigma = 1.0;  // declared upper growth constant

    double operator()(double x) const;

    static SigmaSpec identity();
    static SigmaSpec linear(double lambda);
    // sigma(x) = x + lambda sin(x), |lambda| < 1; l = 1-|lambda|, L = 1+|lambda|
    static SigmaSpec sine_perturbed(double lambda);
};

struct FieldSample {
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::string config_hash;
    bool diverged = false;       // blow-up guard tripped (|u| > 1e12)
    int diverged_step = -1;
    std::vector<int> snapshot_steps;
    Eigen::MatrixXd coeffs;      // N x snapshots, spectral state at each snapshot
    Eigen::MatrixXd values;      // M x snapshots, grid values (filled on request)
};

struct SolveOptions {
    std::vector<int> snapshot_steps;  // steps at which the state is recorded
    bool record_grid_values = false;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::string config_hash;
};

// pre: temporal kernel white; dalang_check passes; u0 bounded nonnegative.
// Divergence is data: the path is flagged, not thrown.
FieldSample solve_path(const spectral::SpectralBasis& basis,
                       const covariance::NoiseSpec& noise_spec,
                       const noise::CovarianceFactor& space_factor,
                       const SigmaSpec& sigma, const Eigen::VectorXd& u0_grid,
                       const noise::NoiseGrid& grid, const SolveOptions& opts);

// Field value u_t(x) from a recorded snapshot column.
double sample_value(const spectral::SpectralBasis& basis, const FieldSample& s,
                    int snapshot_index, double x);

struct AssumptionReport {
    bool ok = false;
    double u0_min = 0.0;
    double u0_max = 0.0;
    double u0_inf_interior = 0.0;  // inf over D_eps
    bool sigma_growth_ok = false;
    std::vector<std::string> failures;
};

// Checks u0 bounded, nonnegative, positive on D_eps, and the sigma growth
// bounds l|x| <= |sigma(x)| <= L|x| on a sample grid. Simulation refuses to
// start on failure (the CLI maps this to a config error).
AssumptionReport validate_assumptions(const spectral::SpectralBasis& basis,
                                      const Eigen::VectorXd& u0_grid, double eps,
                                      const SigmaSpec& sigma);

}  // namespace fshe::solver
