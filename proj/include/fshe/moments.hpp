// Three independent moment computations:
//   * Monte Carlo over solver paths (any sigma, white time),
//   * the deterministic Volterra renewal recursion for the two-point
//     function (sigma = identity, white time) -- the arbitrary-precision
//     referee between theory and MC,
//   * the truncated Wiener-chaos second-moment series (sigma = identity,
//     fbm time),
// plus the Picard lower-bound series and the slope/exponent fits.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fshe/covariance.hpp"
#include "fshe/noise.hpp"
#include "fshe/solver.hpp"
#include "fshe/spectral.hpp"

namespace fshe::moments {

struct MomentEstimate {
    std::vector<double> p_list;
    std::vector<double> t_grid;
    std::vector<double> x_points;
    // estimates[ip](it, ix) = sample mean of |u_t(x)|^p over non-diverged paths
    std::vector<Eigen::MatrixXd> estimates;
    std::vector<Eigen::MatrixXd> ci_half;  // 95% batch-based half widths
    Eigen::MatrixXd mean_field;            // replicate mean of u_t(x)
    Eigen::MatrixXd mean_se;               // standard error of the mean
    int replicates = 0;
    int n_diverged = 0;
    bool usable = false;  // false when every path diverged
};

struct McConfig {
    std::vector<double> p_list{2.0};
    std::vector<int> t_steps;        // snapshot steps (times = step * dt)
    std::vector<double> x_points{0.0};
    int replicates = 100;
    std::uint64_t seed = 0;
    std::string config_hash;
    int threads = 0;
    int batches = 20;  // batch count for the CI
};

// pre: replicates >= 100.
MomentEstimate mc_moments(const spectral::SpectralBasis& basis,
                          const covariance::NoiseSpec& noise_spec,
                          const noise::CovarianceFactor& space_factor,
                          const solver::SigmaSpec& sigma,
                          const Eigen::VectorXd& u0_grid,
                          const noise::NoiseGrid& grid, const McConfig& cfg);

// ---------------------------------------------------------------------------
// Volterra renewal oracle: f_t(x,w) = (G u0)_t(x)(G u0)_t(w)
//   + xi^2 int_0^t iint p(t-s,x,y) p(t-s,w,z) Lambda(y-z) f_s(y,z) dy dz ds,
// marched with left-rectangle quadrature in s and cell-averaged Lambda.
// States are kept as N x N spectral second-moment matrices with running
// log rescaling, so growth rates of order hundreds stay representable.

struct RenewalResult {
    double dt = 0.0;
    std::vector<int> snapshot_steps;
    std::vector<double> t_grid;
    std::vector<double> log_scale;          // log of the factored-out scale
    std::vector<Eigen::MatrixXd> second_moment;  // rescaled N x N matrices
};

RenewalResult renewal_second_moment(const spectral::SpectralBasis& basis, double xi,
                                    const covariance::SpatialKernel& spatial,
                                    const Eigen::VectorXd& u0_grid, double dt,
                                    const std::vector<int>& snapshot_steps);

// f_t(x,w) at snapshot i (may overflow for strongly growing regimes;
// prefer the log form for fits).
double renewal_value(const spectral::SpectralBasis& basis, const RenewalResult& r,
                     int i, double x, double w);

// log f_t(x,x) at snapshot i.
double renewal_log_diag(const spectral::SpectralBasis& basis, const RenewalResult& r,
                        int i, double x);

// ---------------------------------------------------------------------------
// Picard lower-bound series: c e^{-2 mu1 t} sum_{n>=1} (C xi l)^'{2n} (t^n/n!)^{(a-b)/a}.

struct SeriesValue {
    double value = 0.0;
    double log_value = 0.0;
    int terms_used = 0;
    double last_ratio = 0.0;
};

SeriesValue picard_lower_series(double t, double xi, double l_sigma, double C,
                                double c, double mu1, double alpha, double beta,
                                int n_max);

// ---------------------------------------------------------------------------
// Wiener-chaos second moment for fbm time, sigma = identity.

struct ChaosTerm {
    int n = 0;
    double value = 0.0;      // xi^{2n} n! ||h~_n||^2 estimate
    double mc_error = 0.0;   // batch standard error
    bool low_precision = false;  // relative error above 10%
    std::uint64_t samples = 0;
};

struct ChaosResult {
    double g_squared = 0.0;  // ((G u0)_t(x))^2, the n = 0 contribution
    std::vector<ChaosTerm> terms;
    double total = 0.0;
};

struct ChaosConfig {
    int n_min = 1;                    // lowest chaos order computed
    int n_max = 3;                    // <= 3 (dimension-2n integrals)
    std::uint64_t samples = 1000000;  // per term
    std::uint64_t seed = 0;
    std::uint64_t job = 0;  // isolates streams across (t, x) jobs
    int threads = 0;
    int batches = 64;
    double lambda_cell = 0.0;  // Riesz regularization cell; 0 -> basis cell width
};

// pre: n_max <= 3; Dalang check passes. Uniform ordered-simplex sampling in
// each time block, uniform sampling in space, integrand assembled from the
// spectral kernel, pointwise gamma and cell-regularized Lambda.
ChaosResult chaos_second_moment_fbm(const spectral::SpectralBasis& basis, double xi,
                                    const covariance::SpatialKernel& spatial,
                                    double H, const Eigen::VectorXd& u0_grid,
                                    double t, double x, const ChaosConfig& cfg);

// ---------------------------------------------------------------------------
// Fits.

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_se = 0.0;
    int n = 0;
};

// OLS of y against x. pre: >= 2 points (>= 4 for the Lyapunov use).
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// OLS of log m against t over [window_lo, window_hi]. pre: >= 4 points in
// window, all m > 0 (log_scale + log of positive value supplied directly).
LinFit lyapunov_fit(const std::vector<double>& t, const std::vector<double>& log_m,
                    double window_lo, double window_hi);

// Power-law exponent of log m: slope of log(log m) vs log t. pre: log m > 0.
LinFit rho_fit(const std::vector<double>& t, const std::vector<double>& log_m);

}  // namespace fshe::moments
