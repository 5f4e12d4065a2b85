// Gaussian noise on time x space grids with target covariance
// gamma(t-s) Lambda(x-y), assembled from cell averages (finite on the
// diagonal) and factorized for sampling.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "fshe/covariance.hpp"
#include "fshe/rng.hpp"

namespace fshe::noise {

struct NoiseGrid {
    double dt = 0.005;        // time step
    int steps = 200;          // K; horizon T = steps * dt
    Eigen::VectorXd nodes;    // spatial cell midpoints, strictly inside (-1,1)
    Eigen::VectorXd widths;   // cell widths, sum <= 2

    double horizon() const { return dt * steps; }
    static NoiseGrid uniform(double dt, int steps, int cells);
};

struct CovarianceFactor {
    std::string target;       // description of the covariance assembled
    Eigen::MatrixXd cov;      // the target matrix
    Eigen::MatrixXd factor;   // lower-triangular, factor * factor^T ~ cov
    double jitter = 0.0;      // diagonal regularization actually applied
};

// Cell average of the Riesz kernel |.|^{-beta} over two cells of width h at
// midpoint distance r (exact: second antiderivative differences).
double riesz_cell_average(double r, double h, double beta);

// Cell average of the fbm correlation over [0,dt]^2 blocks at lag r
// (equals the fbm increment covariance).
double fbm_cell_average(double r, double dt, double H);

// Spatial covariance C_{jl} = avg of Lambda over cells j, l. pre: riesz.
CovarianceFactor build_space_cov(const NoiseGrid& grid,
                                 const covariance::SpatialKernel& spatial);

// Full (step, cell) covariance: temporal fbm block (x) spatial block.
// pre: steps * cells <= 20000 (dense factorization cap).
CovarianceFactor build_spacetime_cov(const NoiseGrid& grid,
                                     const covariance::SpatialKernel& spatial,
                                     const covariance::TemporalKernel& temporal);

// Mean-zero Gaussian vector with covariance dt * C; draws are indexed
// within the stream by step so replicates and steps never overlap.
Eigen::VectorXd sample_white_time(const CovarianceFactor& f, double dt,
                                  const NormalStream& stream, std::uint64_t step);

// One draw of the full space-time field (covariance = the assembled target).
Eigen::VectorXd sample_spacetime(const CovarianceFactor& f,
                                 const NormalStream& stream, std::uint64_t index);

}  // namespace fshe::noise
