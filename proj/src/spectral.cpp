#include "fshe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fshe::spectral {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpectralBasis build_basis(double alpha, int N, int M) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::domain_error("build_basis: alpha must lie in (0, 2]");
    if (N < 1) throw std::invalid_argument("build_basis: N >= 1 required");
    if (M < 2 * N)
        throw std::invalid_argument("build_basis: M >= 2N required (anti-aliasing)");

    SpectralBasis b;
    b.alpha = alpha;
    b.N = N;
    b.M = M;
    b.eigenvalues.resize(N);
    for (int n = 1; n <= N; ++n)
        b.eigenvalues[n - 1] = std::pow((n * kPi / 2.0) * (n * kPi / 2.0), alpha / 2.0);

    b.nodes.resize(M);
    b.weights.resize(M);
    const double h = 2.0 / M;
    for (int j = 0; j < M; ++j) {
        b.nodes[j] = -1.0 + (2.0 * j + 1.0) / M;  // cell midpoints
        b.weights[j] = h;
    }
    b.phi.resize(M, N);
    for (int j = 0; j < M; ++j)
        for (int n = 1; n <= N; ++n)
            b.phi(j, n - 1) = std::sin(n * kPi * (b.nodes[j] + 1.0) / 2.0);
    return b;
}

double eigenfunction(const SpectralBasis&, int n, double x) {
    return std::sin(n * kPi * (x + 1.0) / 2.0);
}

Eigen::VectorXd eigenfunction_row(const SpectralBasis& b, double x) {
    Eigen::VectorXd row(b.N);
    // sin(n theta) by recurrence; avoids N transcendental calls per point
    const double theta = kPi * (x + 1.0) / 2.0;
    const double s1 = std::sin(theta), c1 = std::cos(theta);
    double sm = 0.0, s = s1;
    for (int n = 1; n <= b.N; ++n) {
        row[n - 1] = s;
        const double nx = 2.0 * c1 * s - sm;
        sm = s;
        s = nx;
    }
    return row;
}

double heat_kernel(const SpectralBasis& b, double t, double x, double y) {
    if (!(t > 0.0))
        throw std::domain_error("heat_kernel: t > 0 required (kernel at t=0 is distributional)");
    const Eigen::VectorXd px = eigenfunction_row(b, x);
    const Eigen::VectorXd py = eigenfunction_row(b, y);
    double sum = 0.0;
    for (int n = 0; n < b.N; ++n)
        sum += std::exp(-b.eigenvalues[n] * t) * px[n] * py[n];
    return sum;
}

double heat_kernel_images(double t, double x, double y) {
    if (!(t > 0.0)) throw std::domain_error("heat_kernel_images: t > 0 required");
    // free kernel of variance 2t, reflected over the lattice of images for
    // the interval (-1,1): period 4, odd reflections at the endpoints
    const auto g = [t](double r) {
        return std::exp(-r * r / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
    };
    double sum = 0.0;
    for (int k = -8; k <= 8; ++k)
        sum += g(x - y - 4.0 * k) - g(x + y + 2.0 - 4.0 * k);
    return sum;
}

Eigen::VectorXd project(const SpectralBasis& b, const Eigen::VectorXd& f) {
    if (f.size() != b.M) throw std::invalid_argument("project: grid size mismatch");
    return b.phi.transpose() * (b.weights.asDiagonal() * f);
}

Eigen::VectorXd semigroup_apply(const SpectralBasis& b, double t,
                                const Eigen::VectorXd& f) {
    if (t < 0.0) throw std::domain_error("semigroup_apply: t >= 0 required");
    Eigen::VectorXd a = project(b, f);
    for (int n = 0; n < b.N; ++n) a[n] *= std::exp(-b.eigenvalues[n] * t);
    return b.phi * a;
}

double semigroup_value(const SpectralBasis& b, const Eigen::VectorXd& a, double t,
                       double x) {
    const Eigen::VectorXd px = eigenfunction_row(b, x);
    double sum = 0.0;
    for (int n = 0; n < b.N; ++n)
        sum += std::exp(-b.eigenvalues[n] * t) * a[n] * px[n];
    return sum;
}

double chapman_kolmogorov_residual(const SpectralBasis& b, double t, double s,
                                   double x, double y) {
    if (!(t > 0.0) || !(s > 0.0))
        throw std::domain_error("chapman_kolmogorov_residual: t, s > 0 required");
    double conv = 0.0;
    for (int j = 0; j < b.M; ++j)
        conv += b.weights[j] * heat_kernel(b, t, x, b.nodes[j]) *
                heat_kernel(b, s, b.nodes[j], y);
    return std::abs(conv - heat_kernel(b, t + s, x, y));
}

double kernel_mass(const SpectralBasis& b, double t, double x) {
    double mass = 0.0;
    for (int j = 0; j < b.M; ++j)
        mass += b.weights[j] * heat_kernel(b, t, x, b.nodes[j]);
    return mass;
}

// ---------------------------------------------------------------------------

EnvelopeKind envelope_kind_from_string(const std::string& s) {
    if (s == "gaussian-exact") return EnvelopeKind::gaussian_exact;
    if (s == "riah-alpha2") return EnvelopeKind::riah_alpha2;
    if (s == "chenkim-stable") return EnvelopeKind::chenkim_stable;
    if (s == "free-stable") return EnvelopeKind::free_stable;
    throw std::invalid_argument("unknown envelope kind: " + s);
}

std::string to_string(EnvelopeKind k) {
    switch (k) {
        case EnvelopeKind::gaussian_exact: return "gaussian-exact";
        case EnvelopeKind::riah_alpha2: return "riah-alpha2";
        case EnvelopeKind::chenkim_stable: return "chenkim-stable";
        case EnvelopeKind::free_stable: return "free-stable";
    }
    return "?";
}

namespace {

// phi_1 comparison function (1-|x|)^{alpha/2} used where the true first
// eigenfunction of the killed stable process is not available.
double phi1_compare(double alpha, double x) {
    return std::pow(std::max(1.0 - std::abs(x), 0.0), alpha / 2.0);
}

double envelope_shape(const SpectralBasis& b, EnvelopeKind kind, double t, double x,
                      double y, double rate) {
    const double mu1 = b.eigenvalues[0];
    const double r = std::abs(x - y);
    switch (kind) {
        case EnvelopeKind::gaussian_exact:
            return std::exp(-r * r / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
        case EnvelopeKind::riah_alpha2: {
            const double p1x = eigenfunction(b, 1, x);
            const double p1y = eigenfunction(b, 1, y);
            const double tmin = std::min(1.0, t);
            const double m = std::min(1.0, p1x * p1y / tmin);
            return m * std::exp(-mu1 * t) * std::exp(-rate * r * r / t) /
                   std::sqrt(tmin);
        }
        case EnvelopeKind::chenkim_stable: {
            const double p1x = phi1_compare(b.alpha, x);
            const double p1y = phi1_compare(b.alpha, y);
            const double st = std::sqrt(t);
            const double heavy =
                std::min(std::pow(t, -1.0 / b.alpha), t / std::pow(r, b.alpha + 1.0));
            const double small_t =
                std::min(1.0, p1x / st) * std::min(1.0, p1y / st) * heavy;
            return std::exp(-mu1 * t) *
                   (t < 1.0 ? small_t : p1x * p1y);
        }
        case EnvelopeKind::free_stable:
            return std::min(std::pow(t, -1.0 / b.alpha),
                            t / std::pow(r, b.alpha + 1.0));
    }
    return 0.0;
}

}  // namespace

EnvelopePair envelope_eval(const SpectralBasis& b, EnvelopeKind kind, double t,
                           double x, double y, const EnvelopeConstants& c) {
    if (!(t > 0.0)) throw std::domain_error("envelope_eval: t > 0 required");
    if (!(c.lower_scale >= 0.0) || !(c.upper_scale > 0.0))
        throw std::domain_error("envelope_eval: constants must be positive");
    return {c.lower_scale * envelope_shape(b, kind, t, x, y, c.lower_rate),
            c.upper_scale * envelope_shape(b, kind, t, x, y, c.upper_rate)};
}

namespace {

FitReport fit_from_ratios(std::vector<double>& log_ratios) {
    FitReport rep;
    rep.points = int(log_ratios.size());
    if (log_ratios.empty()) {
        rep.note = "empty grid";
        return rep;
    }
    const auto [mn, mx] = std::minmax_element(log_ratios.begin(), log_ratios.end());
    double mean = 0.0;
    for (double v : log_ratios) mean += v;
    mean /= double(log_ratios.size());
    rep.lower_scale = std::exp(*mn);
    rep.upper_scale = std::exp(*mx);
    rep.geomean_scale = std::exp(mean);
    rep.log_spread = *mx - *mn;
    rep.violations = 0;  // counted against the covering constants below
    rep.ok = std::isfinite(rep.lower_scale) && rep.lower_scale > 0.0 &&
             std::isfinite(rep.upper_scale);
    if (!rep.ok) rep.note = "non-positive or non-finite fitted constant";
    return rep;
}

}  // namespace

FitReport fit_envelope(const SpectralBasis& b, EnvelopeKind kind,
                       const std::vector<double>& t_grid,
                       const std::vector<double>& xy_grid, EnvelopeConstants rates) {
    std::vector<double> log_lo, log_hi;
    int bad = 0;
    for (double t : t_grid) {
        for (double x : xy_grid) {
            for (double y : xy_grid) {
                const double p = heat_kernel(b, t, x, y);
                const double slo = envelope_shape(b, kind, t, x, y, rates.lower_rate);
                const double shi = envelope_shape(b, kind, t, x, y, rates.upper_rate);
                if (!(p > 0.0) || !(slo > 0.0) || !(shi > 0.0)) {
                    ++bad;
                    continue;
                }
                log_lo.push_back(std::log(p) - std::log(slo));
                log_hi.push_back(std::log(p) - std::log(shi));
            }
        }
    }
    // lower constant from the lower-rate shape, upper from the upper-rate one
    FitReport lo = fit_from_ratios(log_lo);
    FitReport hi = fit_from_ratios(log_hi);
    FitReport rep;
    rep.points = lo.points;
    rep.lower_scale = lo.lower_scale;
    rep.upper_scale = hi.upper_scale;
    rep.geomean_scale = std::sqrt(lo.geomean_scale * hi.geomean_scale);
    rep.log_spread = std::max(lo.log_spread, hi.log_spread);
    rep.violations = bad;
    rep.ok = lo.ok && hi.ok && bad == 0;
    if (bad > 0) rep.note = "kernel or shape non-positive on grid";
    return rep;
}

FitReport fit_short_range_lower(const SpectralBasis& b, double eps,
                                const std::vector<double>& t_grid,
                                const std::vector<double>& xy_grid) {
    const double mu1 = b.eigenvalues[0];
    std::vector<double> log_ratios;
    for (double t : t_grid) {
        const double range = std::pow(t, 1.0 / b.alpha);
        for (double x : xy_grid) {
            if (std::abs(x) > 1.0 - eps) continue;
            for (double y : xy_grid) {
                if (std::abs(y) > 1.0 - eps || std::abs(x - y) >= range) continue;
                const double p = heat_kernel(b, t, x, y);
                const double bound =
                    std::pow(t, -1.0 / b.alpha) * std::exp(-mu1 * t);
                if (!(p > 0.0)) continue;
                log_ratios.push_back(std::log(p / bound));
            }
        }
    }
    return fit_from_ratios(log_ratios);
}

FitReport fit_interior_mass_lower(const SpectralBasis& b, double eps,
                                  const std::vector<double>& t_grid,
                                  const std::vector<double>& x_grid) {
    const double mu1 = b.eigenvalues[0];
    std::vector<double> log_ratios;
    for (double t : t_grid) {
        for (double x : x_grid) {
            if (std::abs(x) > 1.0 - eps) continue;
            double mass = 0.0;
            for (int j = 0; j < b.M; ++j) {
                if (std::abs(b.nodes[j]) > 1.0 - eps) continue;
                mass += b.weights[j] * heat_kernel(b, t, x, b.nodes[j]);
            }
            log_ratios.push_back(std::log(mass) + mu1 * t);
        }
    }
    return fit_from_ratios(log_ratios);
}

}  // namespace fshe::spectral
