#include "fshe/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fshe/noise.hpp"
#include "fshe/quadrature.hpp"

namespace fshe::bounds {

BoundCurve thm1_curve(const BoundParams& p) {
    const double e = p.xi_exponent();
    const double lo_rate = p.c2 * std::pow(p.xi, e) - p.mu1;
    const double hi_rate =
        p.C2 * std::pow(p.xi * p.bdg(), e) - (1.0 - p.delta) * p.mu1;
    const double pl = p.p, lc1 = std::log(p.c1), lC1 = std::log(p.C1);
    BoundCurve c;
    c.log_lower = [pl, lc1, lo_rate](double t) { return pl * (lc1 + t * lo_rate); };
    c.log_upper = [pl, lC1, hi_rate](double t) { return pl * (lC1 + t * hi_rate); };
    return c;
}

double thm1_threshold_closed_form(const BoundParams& p) {
    return std::pow(p.mu1 / p.c2, (p.alpha - p.beta) / (2.0 * p.alpha));
}

double thm1_threshold_bisect(const BoundParams& p) {
    const double e = p.xi_exponent();
    const auto rate = [&](double xi) { return p.c2 * std::pow(xi, e) - p.mu1; };
    double lo = 1e-8, hi = 1e8;
    if (rate(lo) > 0.0 || rate(hi) < 0.0)
        throw std::runtime_error("thm1_threshold_bisect: rate does not change sign");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BoundCurve thm2_curve(const BoundParams& p, const covariance::TemporalKernel& temporal) {
    if (temporal.kind == covariance::TemporalKind::white)
        throw std::domain_error("thm2_curve: temporal kernel must satisfy local integrability");
    const double e = p.xi_exponent();
    const double ea = p.alpha / (p.alpha - p.beta);
    const double xie = std::pow(p.xi, e);
    const double pf = std::pow(p.p - 1.0, ea);
    const BoundParams q = p;
    BoundCurve c;
    c.log_lower = [q, ea, xie, temporal](double t) {
        const double rate =
            q.c2 * std::pow(covariance::eta(temporal, t), ea) * xie - q.mu1;
        return q.p * (std::log(q.c1) + t * rate);
    };
    c.log_upper = [q, ea, xie, pf, temporal](double t) {
        const double rate = q.C2 * pf * std::pow(covariance::kappa(temporal, t), ea) * xie -
                            (1.0 - q.delta) * q.mu1;
        return q.p * (std::log(q.C1) + t * rate);
    };
    return c;
}

BoundCurve thm2_curve_fixed(const BoundParams& p, double kappa_const, double eta_const) {
    if (!(kappa_const >= 0.0) || !(eta_const >= 0.0))
        throw std::domain_error("thm2_curve_fixed: kappa, eta >= 0");
    const double e = p.xi_exponent();
    const double ea = p.alpha / (p.alpha - p.beta);
    const double lo_rate = p.c2 * std::pow(eta_const, ea) * std::pow(p.xi, e) - p.mu1;
    const double hi_rate = p.C2 * std::pow(p.p - 1.0, ea) * std::pow(kappa_const, ea) *
                               std::pow(p.xi, e) -
                           (1.0 - p.delta) * p.mu1;
    const double pl = p.p, lc1 = std::log(p.c1), lC1 = std::log(p.C1);
    BoundCurve c;
    c.log_lower = [pl, lc1, lo_rate](double t) { return pl * (lc1 + t * lo_rate); };
    c.log_upper = [pl, lC1, hi_rate](double t) { return pl * (lC1 + t * hi_rate); };
    return c;
}

BoundCurve cor3_curve(const BoundParams& p) {
    const double rho = rho_exponent(p.alpha, p.beta, p.H);
    const double e = p.xi_exponent();
    const double ea = p.alpha / (p.alpha - p.beta);
    const double xie = std::pow(p.xi, e);
    const BoundParams q = p;
    BoundCurve c;
    c.log_lower = [q, rho, xie](double t) {
        return q.p * std::log(q.c1) +
               q.c2 * q.p * (std::pow(t, rho) * xie - q.mu1 * t);
    };
    c.log_upper = [q, rho, xie, ea](double t) {
        return q.p * std::log(q.C1) +
               q.C2 * q.p * (std::pow(q.p - 1.0, ea) * std::pow(t, rho) * xie -
                             (q.mu1 - q.delta) * t);
    };
    return c;
}

double rho_exponent(double alpha, double beta, double H) {
    return (2.0 * H * alpha - beta) / (alpha - beta);
}

// ---------------------------------------------------------------------------

double simplex_integral(int n, double zeta, double a, double b) {
    if (n < 1) throw std::invalid_argument("simplex_integral: n >= 1");
    if (!(zeta > -1.0)) throw std::domain_error("simplex_integral: divergent for zeta <= -1");
    if (!(b > a) || a < 0.0) throw std::invalid_argument("simplex_integral: need b > a >= 0");
    const double lg = n * std::lgamma(1.0 + zeta) + n * (1.0 + zeta) * std::log(b - a) -
                      std::lgamma(n * (1.0 + zeta) + 1.0);
    return std::exp(lg);
}

double simplex_integral_quadrature(int n, double zeta, double a, double b) {
    if (n < 1 || n > 3)
        throw std::invalid_argument("simplex_integral_quadrature: n in {1,2,3}");
    if (!(zeta > -1.0)) throw std::domain_error("simplex_integral_quadrature: zeta > -1");
    const auto pw = [zeta](double u) { return std::pow(u, zeta); };
    if (n == 1)
        return integrate_tanh_sinh([&](double r1) { return pw(b - r1); }, a, b);
    if (n == 2)
        return integrate_tanh_sinh(
            [&](double r2) {
                const double inner =
                    integrate_tanh_sinh([&](double r1) { return pw(r2 - r1); }, a, r2, 6);
                return inner * pw(b - r2);
            },
            a, b);
    return integrate_tanh_sinh(
        [&](double r3) {
            const double mid = integrate_tanh_sinh(
                [&](double r2) {
                    const double inner = integrate_tanh_sinh(
                        [&](double r1) { return pw(r2 - r1); }, a, r2, 5);
                    return inner * pw(r3 - r2);
                },
                a, r3, 6);
            return mid * pw(b - r3);
        },
        a, b);
}

// ---------------------------------------------------------------------------

MlSeries ml_series(double x, double nu, int from_k, int max_terms) {
    if (!(x > 0.0) || !(nu > 0.0)) throw std::domain_error("ml_series: x > 0, nu > 0");
    if (from_k < 0) throw std::invalid_argument("ml_series: from_k >= 0");
    MlSeries out;
    const double lx = std::log(x);
    double log_max = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for (int k = from_k; k < from_k + max_terms; ++k) {
        const double lt = k * lx - nu * std::lgamma(k + 1.0);
        logs.push_back(lt);
        log_max = std::max(log_max, lt);
        out.terms = int(logs.size());
        // ratio x / (k+1)^nu < 1 and remaining tail below 1e-12 of the sum
        const double ratio = x / std::pow(k + 1.0, nu);
        if (ratio < 1.0 && std::exp(lt - log_max) * ratio / (1.0 - ratio) < 1e-12) {
            out.converged = true;
            break;
        }
    }
    double s = 0.0;
    for (double lt : logs) s += std::exp(lt - log_max);
    out.log_value = log_max + std::log(s);
    out.value = std::exp(out.log_value);
    return out;
}

SandwichFit ml_bounds_check(const std::vector<double>& x_grid, double nu) {
    SandwichFit fit;
    if (x_grid.size() < 2) return fit;
    std::vector<double> z, logv;  // z = x^{1/nu}
    for (double x : x_grid) {
        const auto s = ml_series(x, nu, 0, 100000);
        if (!s.converged) return fit;
        z.push_back(std::pow(x, 1.0 / nu));
        logv.push_back(s.log_value);
    }
    fit.points = int(z.size());
    // log series = log C + c z; least-squares slope, then shift the intercept
    // each way so the exponentials cover the data
    double mz = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        mz += z[i];
        mv += logv[i];
    }
    mz /= double(z.size());
    mv /= double(z.size());
    double szz = 0.0, szv = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        szz += (z[i] - mz) * (z[i] - mz);
        szv += (z[i] - mz) * (logv[i] - mv);
    }
    const double slope = szv / szz;
    if (!(slope > 0.0)) return fit;
    fit.c1 = slope;
    fit.c2 = slope;
    double up_shift = -std::numeric_limits<double>::infinity();
    double lo_shift = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) {
        up_shift = std::max(up_shift, logv[i] - slope * z[i]);
        lo_shift = std::min(lo_shift, logv[i] - slope * z[i]);
    }
    fit.C1 = std::exp(up_shift);
    fit.c1p = std::exp(lo_shift);
    fit.violations = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double lo = lo_shift + slope * z[i];
        const double hi = up_shift + slope * z[i];
        if (logv[i] < lo - 1e-12 || logv[i] > hi + 1e-12) ++fit.violations;
    }
    fit.ok = fit.violations == 0 && fit.C1 > 0.0 && fit.c1p > 0.0;
    return fit;
}

double stirling_ratio(int n, double tau) {
    if (n < 1 || !(tau > 0.0)) throw std::invalid_argument("stirling_ratio: n >= 1, tau > 0");
    return std::exp(std::lgamma(n * tau + 1.0) - tau * std::lgamma(n + 1.0));
}

double stirling_lambda_bound(double tau, int n_max) {
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double lr =
            std::abs(std::lgamma(n * tau + 1.0) - tau * std::lgamma(n + 1.0));
        worst = std::max(worst, lr / n);
    }
    return std::exp(worst);
}

// ---------------------------------------------------------------------------

GronwallCurve gronwall_curve(double c2, double kappa_const, double rho, double c3) {
    if (!(rho > 0.0)) throw std::domain_error("gronwall_curve: rho > 0");
    GronwallCurve c;
    c.c2 = c2;
    c.c3 = c3;
    c.rate = std::pow(std::tgamma(rho) * kappa_const, 1.0 / rho);
    return c;
}

GronwallFit gronwall_verify_on(const std::vector<double>& t,
                               const std::vector<double>& log_f, double kappa_const,
                               double rho) {
    GronwallFit fit;
    if (t.size() != log_f.size() || t.size() < 2) return fit;
    const double rate = std::pow(std::tgamma(rho) * kappa_const, 1.0 / rho);
    // choose c3 to match the largest forward secant slope, then lift c2
    double max_slope = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        max_slope = std::max(max_slope, (log_f[i] - log_f[0]) / (t[i] - t[0]));
    fit.c3 = std::max(1.0, max_slope / rate);
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i)
        shift = std::max(shift, log_f[i] - fit.c3 * rate * t[i]);
    fit.c2 = std::exp(shift);
    fit.violations = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (log_f[i] > shift + fit.c3 * rate * t[i] + 1e-12) ++fit.violations;
    fit.ok = fit.violations == 0 && std::isfinite(fit.c2) && fit.c2 > 0.0;
    return fit;
}

// ---------------------------------------------------------------------------

namespace {

double timsc_integral(double alpha, double beta, double t, double w, double tol) {
    // int_R e^{-t|v|^alpha} |w-v|^{-1+beta} dv, singular at v = w; cutoff where
    // the exponential is below ~1e-26
    const double V = std::pow(60.0 / t, 1.0 / alpha);
    const auto f = [&](double v) {
        return std::exp(-t * std::pow(std::abs(v), alpha)) *
               std::pow(std::abs(w - v), beta - 1.0);
    };
    const double lo = -V, hi = V;
    double total = 0.0;
    if (w <= lo || w >= hi) {
        total = integrate_adaptive(f, lo, hi, tol);
    } else {
        // tanh-sinh on both sides of the singularity, adaptive elsewhere
        const double a1 = std::max(lo, w - 1.0), b1 = std::min(hi, w + 1.0);
        total += integrate_tanh_sinh(f, a1, w);
        total += integrate_tanh_sinh(f, w, b1);
        if (a1 > lo) total += integrate_adaptive(f, lo, a1, tol);
        if (b1 < hi) total += integrate_adaptive(f, b1, hi, tol);
    }
    return total;
}

}  // namespace

TimscReport timsc_check(double alpha, double beta, const std::vector<double>& t_grid,
                        const std::vector<double>& w_grid) {
    if (!(beta > 0.0) || !(beta < 1.0)) throw std::domain_error("timsc_check: 0 < beta < 1");
    TimscReport rep;
    double coarse_sup = 0.0, fine_sup = 0.0;
    double per_t_min = std::numeric_limits<double>::infinity(), per_t_max = 0.0;
    for (double t : t_grid) {
        double sup_t = 0.0;
        for (double w : w_grid) {
            const double coarse =
                std::pow(t, beta / alpha) * timsc_integral(alpha, beta, t, w, 1e-8);
            const double fine =
                std::pow(t, beta / alpha) * timsc_integral(alpha, beta, t, w, 1e-11);
            if (!std::isfinite(fine))
                throw std::runtime_error("timsc_check: quadrature failed to converge");
            coarse_sup = std::max(coarse_sup, coarse);
            fine_sup = std::max(fine_sup, fine);
            sup_t = std::max(sup_t, fine);
        }
        per_t_min = std::min(per_t_min, sup_t);
        per_t_max = std::max(per_t_max, sup_t);
    }
    rep.sup_value = fine_sup;
    rep.refinement_change = std::abs(fine_sup - coarse_sup) / fine_sup;
    rep.t_spread = (per_t_max - per_t_min) / per_t_max;
    return rep;
}

// ---------------------------------------------------------------------------

double kernel_pair_integral(const spectral::SpectralBasis& basis, double beta,
                            double t, double s, double x, double w) {
    const int M = basis.M;
    const double h = basis.cell_width();
    Eigen::VectorXd px(M), pw(M);
    for (int j = 0; j < M; ++j) {
        px[j] = basis.weights[j] * spectral::heat_kernel(basis, t, x, basis.nodes[j]);
        pw[j] = basis.weights[j] * spectral::heat_kernel(basis, s, w, basis.nodes[j]);
    }
    double total = 0.0;
    for (int j = 0; j < M; ++j) {
        double row = 0.0;
        for (int l = 0; l < M; ++l)
            row += noise::riesz_cell_average(basis.nodes[j] - basis.nodes[l], h, beta) * pw[l];
        total += px[j] * row;
    }
    return total;
}

KernelIntegralReport kernel_integral_check_lm2(const spectral::SpectralBasis& basis,
                                               double beta,
                                               const std::vector<double>& t_grid,
                                               const std::vector<double>& s_grid,
                                               double delta,
                                               const std::vector<double>& xw_grid) {
    KernelIntegralReport rep;
    const double mu1 = basis.eigenvalues[0];
    double c2_pair = 0.0, c2_diag = 0.0, sym_err = 0.0;
    for (double t : t_grid) {
        for (double s : s_grid) {
            for (double x : xw_grid) {
                for (double w : xw_grid) {
                    const double v = kernel_pair_integral(basis, beta, t, s, x, w);
                    const double vswap = kernel_pair_integral(basis, beta, s, t, w, x);
                    sym_err = std::max(sym_err, std::abs(v - vswap) /
                                                    std::max(1e-300, std::abs(v)));
                    const double env = std::exp(-(1.0 - delta) * mu1 * (t + s)) *
                                       std::pow(t + s, -beta / basis.alpha);
                    c2_pair = std::max(c2_pair, v / env);
                    if (t == s) {
                        const double envd = std::exp(-(2.0 - delta) * mu1 * t) *
                                            std::pow(t, -beta / basis.alpha);
                        c2_diag = std::max(c2_diag, v / envd);
                    }
                }
            }
        }
    }
    rep.c2_pair = c2_pair;
    rep.c2_diagonal = c2_diag;
    rep.max_symmetry_error = sym_err;
    rep.violations = 0;  // constants are covering maxima by construction
    rep.ok = std::isfinite(c2_pair) && c2_pair > 0.0 && c2_diag > 0.0;
    return rep;
}

}  // namespace fshe::bounds
