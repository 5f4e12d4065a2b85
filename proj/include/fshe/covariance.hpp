// Spatial and temporal correlation kernels of the driving noise, the Dalang
// existence condition, and the time aggregates kappa(t), eta(t).
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fshe::covariance {

enum class SpatialKind { white, riesz, bessel, fractional };
enum class TemporalKind { white, fbm };

struct SpatialKernel {
    SpatialKind kind = SpatialKind::riesz;
    double beta = 0.5;              // riesz exponent, 0 < beta < d
    double bessel_eta = 1.0;        // bessel smoothness
    std::vector<double> hurst;      // fractional kernel indices, each in (1/2,1)
    int d = 1;                      // ambient dimension for condition checks

    static SpatialKernel make_white(int d = 1);
    static SpatialKernel make_riesz(double beta, int d = 1);
    static SpatialKernel make_bessel(double eta, int d = 1);
    static SpatialKernel make_fractional(std::vector<double> hurst);
};

struct TemporalKernel {
    TemporalKind kind = TemporalKind::white;
    double H = 0.75;     // fbm index in (1/2, 1)
    double C_H = 0.375;  // H(2H-1), precomputed

    static TemporalKernel make_white();
    static TemporalKernel make_fbm(double H);
};

struct NoiseSpec {
    double xi = 1.0;  // noise level, >= 0
    SpatialKernel spatial;
    TemporalKernel temporal;
};

struct PointwiseValue {
    bool distributional = false;  // white kernels have no pointwise value
    double value = 0.0;
};

// Lambda(r). pre: r != 0 for riesz/fractional (singular at the origin);
// callers feeding grids must use cell-averaged covariance (noise module).
PointwiseValue lambda_eval(const SpatialKernel& k, double r);

// gamma(r) = C_H |r|^{2H-2} for fbm. pre: r != 0.
PointwiseValue gamma_eval(const TemporalKernel& k, double r);

struct DalangResult {
    bool holds = false;
    std::string rule;
};

// Closed-form Dalang condition per kernel family (no numeric integration).
DalangResult dalang_check(const SpatialKernel& k, double alpha, int d);

// kappa(t) = 2 int_0^t gamma, eta(t) = int_0^{t/3} gamma; closed power-law
// forms for fbm. White temporal kernel is not locally integrable -> throws.
double kappa(const TemporalKernel& k, double t);
double eta(const TemporalKernel& k, double t);

}  // namespace fshe::covariance
