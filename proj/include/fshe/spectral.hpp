// Dirichlet (fractional) Laplacian on D = (-1, 1): eigenpairs, truncated
// spectral heat kernel, semigroup action, and evaluable two-sided kernel
// envelopes with empirically fitted constants.
//
// Eigenfunctions are phi_n(x) = sin(n pi (x+1)/2), orthonormal in L2(D).
// For alpha = 2 the eigenvalues are exact, mu_n = (n pi / 2)^2; for
// alpha < 2 we use the spectral power mu_n^{alpha/2} of the Dirichlet
// Laplacian (same eigenfunctions). That operator is not the generator of
// the killed stable process; it is a Dirichlet-type stand-in whose kernel
// is required, by the envelope checks below, to obey the same two-sided
// estimates on the test grids.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace fshe::spectral {

struct SpectralBasis {
    double alpha = 2.0;
    int N = 64;                    // number of retained modes
    int M = 256;                   // quadrature nodes (cell midpoints)
    Eigen::VectorXd eigenvalues;   // mu_1 < ... < mu_N
    Eigen::VectorXd nodes;         // x_j strictly inside (-1,1)
    Eigen::VectorXd weights;       // cell widths, sum = 2
    Eigen::MatrixXd phi;           // M x N, phi(j,n) = phi_{n+1}(x_j)

    double cell_width() const { return 2.0 / M; }
};

// pre: alpha in (0,2], N >= 1, M >= 2N (anti-aliasing).
SpectralBasis build_basis(double alpha, int N, int M);

// phi_n evaluated at an arbitrary point (n is 1-based).
double eigenfunction(const SpectralBasis& b, int n, double x);

// Vector (phi_1(x), ..., phi_N(x)).
Eigen::VectorXd eigenfunction_row(const SpectralBasis& b, double x);

// Truncated series sum_n e^{-mu_n t} phi_n(x) phi_n(y). pre: t > 0.
double heat_kernel(const SpectralBasis& b, double t, double x, double y);

// Exact interval kernel for alpha = 2 via the method of images (reference
// oracle; independent of the eigenbasis).
double heat_kernel_images(double t, double x, double y);

// Semigroup action on a grid function f (values at basis nodes).
// t = 0 returns the projection of f onto the first N modes.
Eigen::VectorXd semigroup_apply(const SpectralBasis& b, double t,
                                const Eigen::VectorXd& f);

// Spectral coefficients of a grid function under the quadrature inner product.
Eigen::VectorXd project(const SpectralBasis& b, const Eigen::VectorXd& f);

// (G u0)_t(x) from precomputed coefficients a = project(b, u0).
double semigroup_value(const SpectralBasis& b, const Eigen::VectorXd& a, double t,
                       double x);

// | int_D p(t,x,z) p(s,z,y) dz  -  p(t+s,x,y) |  by grid quadrature.
double chapman_kolmogorov_residual(const SpectralBasis& b, double t, double s,
                                   double x, double y);

// Quadrature mass int_D p(t,x,y) dy.
double kernel_mass(const SpectralBasis& b, double t, double x);

// ---------------------------------------------------------------------------
// Kernel envelopes.

enum class EnvelopeKind { gaussian_exact, riah_alpha2, chenkim_stable, free_stable };

EnvelopeKind envelope_kind_from_string(const std::string& s);
std::string to_string(EnvelopeKind k);

struct EnvelopeConstants {
    double lower_scale = 1.0;  // multiplicative constant, lower side
    double upper_scale = 1.0;  // multiplicative constant, upper side
    double lower_rate = 0.5;   // Gaussian decay rate c (riah/gaussian kinds)
    double upper_rate = 0.125;
};

struct KernelEnvelope {
    EnvelopeKind kind;
    double alpha;
    EnvelopeConstants constants;
};

struct EnvelopePair {
    double lower;
    double upper;
};

// Evaluates the two-sided envelope shape times the supplied constants.
// For chenkim_stable the first eigenfunction is replaced by its boundary
// comparison (1-|x|)^{alpha/2} (the true stable eigenfunction is unavailable).
// pre: t > 0, constants positive.
EnvelopePair envelope_eval(const SpectralBasis& b, EnvelopeKind kind, double t,
                           double x, double y, const EnvelopeConstants& c);

struct FitReport {
    bool ok = false;
    double lower_scale = 0.0;   // tightest constants covering the grid
    double upper_scale = 0.0;
    double geomean_scale = 0.0; // log-least-squares fit of a single constant
    double log_spread = 0.0;    // max - min of log ratios (fit conditioning)
    int violations = 0;         // grid points outside [lower, upper] post-fit
    int points = 0;
    std::string note;
};

// Fits envelope constants so the spectral kernel lies between the lower and
// upper envelope on the (t, x, y) grid; counts violations post-fit.
FitReport fit_envelope(const SpectralBasis& b, EnvelopeKind kind,
                       const std::vector<double>& t_grid,
                       const std::vector<double>& xy_grid,
                       EnvelopeConstants rates = EnvelopeConstants{});

// p(t,x,y) >= c t^{-1/alpha} e^{-mu_1 t} on |x-y| < t^{1/alpha}, x,y in
// D_eps. Returns the fitted c (min ratio) and violation count for c > 0.
FitReport fit_short_range_lower(const SpectralBasis& b, double eps,
                                const std::vector<double>& t_grid,
                                const std::vector<double>& xy_grid);

// int_{D_eps} p(t,x,y) dy >= c e^{-mu_1 t} for x in D_eps.
FitReport fit_interior_mass_lower(const SpectralBasis& b, double eps,
                                  const std::vector<double>& t_grid,
                                  const std::vector<double>& x_grid);

}  // namespace fshe::spectral
