// Evaluable closed-form bound curves and auxiliary identities: the two-sided
// moment bounds (white and fbm noise), the simplex-integral identity, the
// series sandwiches, the Stirling-type ratio, the fractional Gronwall bound,
// and the kernel-integral estimates.
//
// Existential constants are always inputs or fit outputs, never asserted
// values. All heavy-tail arithmetic is done through log-gamma / log-sum-exp.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fshe/covariance.hpp"
#include "fshe/spectral.hpp"

namespace fshe::bounds {

struct BoundParams {
    double alpha = 2.0;
    double beta = 0.5;
    int d = 1;
    double mu1 = 2.4674011002723395;  // (pi/2)^2
    double p = 2.0;
    double xi = 1.0;
    double delta = 0.1;       // the paper's "for all delta > 0" slack
    double z_p = 0.0;         // BDG constant; 0 -> default 2 sqrt(p)
    double l_sigma = 1.0;
    double L_sigma = 1.0;
    double H = 0.75;          // fbm index (thm2/cor3 only)
    // existential constants, lower and upper
    double c1 = 1.0, c2 = 1.0, C1 = 1.0, C2 = 1.0;

    double xi_exponent() const { return 2.0 * alpha / (alpha - beta); }
    double bdg() const { return z_p > 0.0 ? z_p : 2.0 * std::sqrt(p); }
};

struct BoundCurve {
    std::function<double(double)> log_lower;  // log of the lower bound at t
    std::function<double(double)> log_upper;
    double lower(double t) const { return std::exp(log_lower(t)); }
    double upper(double t) const { return std::exp(log_upper(t)); }
};

// White-in-time bounds:
//   lower: c1^p exp(p t (c2 xi^{2a/(a-b)} - mu1))
//   upper: C1^p exp(p t (C2 (xi z_p)^{2a/(a-b)} - (1-delta) mu1))
BoundCurve thm1_curve(const BoundParams& p);

// Lower-rate zero crossing of thm1: xi* = (mu1/c2)^{(a-b)/(2a)}.
double thm1_threshold_closed_form(const BoundParams& p);
double thm1_threshold_bisect(const BoundParams& p);  // root of the rate, for cross-checking

// Time-correlated bounds with kappa(t), eta(t) evaluated pointwise:
//   lower rate: c2 eta(t)^{a/(a-b)} xi^{2a/(a-b)} - mu1
//   upper rate: C2 (p-1)^{a/(a-b)} kappa(t)^{a/(a-b)} xi^{2a/(a-b)} - (1-delta) mu1
BoundCurve thm2_curve(const BoundParams& p, const covariance::TemporalKernel& temporal);

// Same display with kappa, eta frozen at supplied constants (log-affine in t).
BoundCurve thm2_curve_fixed(const BoundParams& p, double kappa_const, double eta_const);

// fbm corollary: exponents t^rho xi^{2a/(a-b)} with rho = (2Ha-b)/(a-b).
BoundCurve cor3_curve(const BoundParams& p);

double rho_exponent(double alpha, double beta, double H);

// ---------------------------------------------------------------------------
// Simplex integral  I_n^zeta(a,b) = int_{a<r1<...<rn<b} prod gaps^zeta dr
//                                 = Gamma(1+zeta)^n (b-a)^{n(1+zeta)} / Gamma(n(1+zeta)+1).
// pre: zeta > -1, b > a >= 0, n >= 1. Computed in log-gamma space.
double simplex_integral(int n, double zeta, double a, double b);

// Nested tanh-sinh quadrature of the same integral, n <= 3 (independent oracle).
double simplex_integral_quadrature(int n, double zeta, double a, double b);

// ---------------------------------------------------------------------------
// sum_{k >= from_k} x^k / (k!)^nu, stable partial sum in log space.
struct MlSeries {
    double value = 0.0;
    double log_value = 0.0;
    int terms = 0;
    bool converged = false;  // tail below 1e-12 relative within the term cap
};
MlSeries ml_series(double x, double nu, int from_k, int max_terms);

struct SandwichFit {
    bool ok = false;
    // series <= C1 exp(c1 x^{1/nu}) and series >= c1p exp(c2 x^{1/nu})
    double C1 = 0.0, c1 = 0.0, c1p = 0.0, c2 = 0.0;
    int violations = 0;
    int points = 0;
};
SandwichFit ml_bounds_check(const std::vector<double>& x_grid, double nu);

// Gamma(n tau + 1) / (n!)^tau via log-gamma.
double stirling_ratio(int n, double tau);

// max_{1 <= n <= n_max} |log ratio| / n; lambda = exp of this bounds C_n both sides.
double stirling_lambda_bound(double tau, int n_max);

// ---------------------------------------------------------------------------
// Fractional Gronwall bound  f(t) <= c2 exp(c3 (Gamma(rho) kappa)^{1/rho} t).
struct GronwallCurve {
    double rate = 0.0;  // (Gamma(rho) kappa)^{1/rho}
    double c2 = 1.0, c3 = 1.0;
    double log_eval(double t) const { return std::log(c2) + c3 * rate * t; }
};
GronwallCurve gronwall_curve(double c2, double kappa_const, double rho, double c3 = 1.0);

struct GronwallFit {
    bool ok = false;
    double c2 = 0.0, c3 = 0.0;
    int violations = 0;
};
// Fits c2, c3 so the bound dominates the sampled curve (log values) at the
// given times; violations counted post-fit.
GronwallFit gronwall_verify_on(const std::vector<double>& t,
                               const std::vector<double>& log_f, double kappa_const,
                               double rho);

// ---------------------------------------------------------------------------
// sup over (t, w) grids of  t^{beta/alpha} * int_R e^{-t|v|^alpha} |w-v|^{-1+beta} dv.
struct TimscReport {
    double sup_value = 0.0;
    double refinement_change = 0.0;  // relative change under doubled quadrature
    double t_spread = 0.0;           // relative spread of per-t sups
};
TimscReport timsc_check(double alpha, double beta, const std::vector<double>& t_grid,
                        const std::vector<double>& w_grid);

// ---------------------------------------------------------------------------
// iint p(t,x,y) p(s,w,z) Lambda(y-z) dy dz vs c2 e^{-(1-delta) mu1 (t+s)} (t+s)^{-b/a}
// (and the t = s diagonal against c2 e^{-(2-delta) mu1 t} t^{-b/a}).
struct KernelIntegralReport {
    bool ok = false;
    double c2_pair = 0.0;      // fitted constant, general (t,s)
    double c2_diagonal = 0.0;  // fitted constant, t = s
    int violations = 0;
    double max_symmetry_error = 0.0;
};
KernelIntegralReport kernel_integral_check_lm2(const spectral::SpectralBasis& basis,
                                               double beta,
                                               const std::vector<double>& t_grid,
                                               const std::vector<double>& s_grid,
                                               double delta,
                                               const std::vector<double>& xw_grid);

// The integral itself (grid quadrature with cell-averaged Lambda).
double kernel_pair_integral(const spectral::SpectralBasis& basis, double beta,
                            double t, double s, double x, double w);

}  // namespace fshe::bounds
