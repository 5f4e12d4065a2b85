#include "fshe/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fshe/parallel.hpp"
#include "fshe/rng.hpp"

namespace fshe::moments {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 97.5% Student-t quantiles for small degrees of freedom (batch CIs).
double t_quantile_975(int df) {
    static const double tab[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                 2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                 2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                 2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                 2.045,  2.042};
    if (df < 1) return tab[0];
    if (df <= 30) return tab[df - 1];
    return 1.96;
}

// sum_n e^{-mu_n dt} a_n b_n; for alpha = 2 the exponentials follow the
// recurrence e_{n+1} = e_n q^{2n+1}, avoiding one exp per mode.
double decay_sum2(const spectral::SpectralBasis& basis, double dt, const double* a,
                  const double* b) {
    const int N = basis.N;
    double sum = 0.0;
    if (basis.alpha == 2.0) {
        const double q = std::exp(-basis.eigenvalues[0] * dt);
        if (q == 0.0) return 0.0;
        const double q2 = q * q;
        double e = q, p = q * q2;
        for (int n = 0; n < N; ++n) {
            sum += e * a[n] * b[n];
            e *= p;
            if (e < 1e-300) break;
            p *= q2;
        }
    } else {
        for (int n = 0; n < N; ++n)
            sum += std::exp(-basis.eigenvalues[n] * dt) * a[n] * b[n];
    }
    return sum;
}

void fill_row(const spectral::SpectralBasis& basis, double x, double* row) {
    const double theta = kPi * (x + 1.0) / 2.0;
    const double c1 = std::cos(theta);
    double sm = 0.0, s = std::sin(theta);
    for (int n = 0; n < basis.N; ++n) {
        row[n] = s;
        const double nx = 2.0 * c1 * s - sm;
        sm = s;
        s = nx;
    }
}

}  // namespace

// ---------------------------------------------------------------------------

MomentEstimate mc_moments(const spectral::SpectralBasis& basis,
                          const covariance::NoiseSpec& noise_spec,
                          const noise::CovarianceFactor& space_factor,
                          const solver::SigmaSpec& sigma,
                          const Eigen::VectorXd& u0_grid,
                          const noise::NoiseGrid& grid, const McConfig& cfg) {
    if (cfg.replicates < 100)
        throw std::invalid_argument("mc_moments: replicates >= 100 required");
    if (cfg.t_steps.empty() || cfg.x_points.empty())
        throw std::invalid_argument("mc_moments: empty observation grid");

    const int T = int(cfg.t_steps.size());
    const int X = int(cfg.x_points.size());
    const int R = cfg.replicates;

    Eigen::MatrixXd xrows(X, basis.N);
    for (int ix = 0; ix < X; ++ix)
        xrows.row(ix) = spectral::eigenfunction_row(basis, cfg.x_points[ix]).transpose();

    // one observation block per replicate: u values at (t, x), or divergence
    std::vector<Eigen::MatrixXd> obs(R);
    std::vector<char> bad(R, 0);
    parallel_for(R, cfg.threads, [&](std::int64_t r) {
        solver::SolveOptions opts;
        opts.snapshot_steps = cfg.t_steps;
        opts.seed = cfg.seed;
        opts.replicate = std::uint64_t(r);
        opts.config_hash = cfg.config_hash;
        const auto path = solver::solve_path(basis, noise_spec, space_factor, sigma,
                                             u0_grid, grid, opts);
        if (path.diverged) {
            bad[r] = 1;
            return;
        }
        Eigen::MatrixXd v(T, X);
        for (int it = 0; it < T; ++it)
            for (int ix = 0; ix < X; ++ix)
                v(it, ix) = xrows.row(ix).dot(path.coeffs.col(it));
        obs[r] = std::move(v);
    });

    MomentEstimate est;
    est.p_list = cfg.p_list;
    est.x_points = cfg.x_points;
    est.t_grid.resize(T);
    for (int it = 0; it < T; ++it) est.t_grid[it] = cfg.t_steps[it] * grid.dt;
    est.replicates = R;
    for (char b : bad) est.n_diverged += b;
    est.usable = est.n_diverged < R;

    const int P = int(cfg.p_list.size());
    est.estimates.assign(P, Eigen::MatrixXd::Zero(T, X));
    est.ci_half.assign(P, Eigen::MatrixXd::Zero(T, X));
    est.mean_field.setZero(T, X);
    est.mean_se.setZero(T, X);
    if (!est.usable) return est;

    const int B = std::max(2, std::min(cfg.batches, R / 2));
    std::vector<double> bm(B);
    const double tq = t_quantile_975(B - 1);

    for (int it = 0; it < T; ++it) {
        for (int ix = 0; ix < X; ++ix) {
            for (int ip = 0; ip <= P; ++ip) {
                // ip == P is the plain mean of u (martingale diagnostics)
                const double p = (ip < P) ? cfg.p_list[ip] : 1.0;
                const bool absval = ip < P;
                double total = 0.0;
                long count = 0;
                for (int b = 0; b < B; ++b) {
                    const long lo = (long(R) * b) / B, hi = (long(R) * (b + 1)) / B;
                    double s = 0.0;
                    long c = 0;
                    for (long r = lo; r < hi; ++r) {
                        if (bad[r]) continue;
                        const double u = obs[r](it, ix);
                        s += absval ? std::pow(std::abs(u), p) : u;
                        ++c;
                    }
                    bm[b] = (c > 0) ? s / double(c) : 0.0;
                    total += s;
                    count += c;
                }
                const double mean = total / double(count);
                double var = 0.0;
                for (int b = 0; b < B; ++b) var += (bm[b] - mean) * (bm[b] - mean);
                var /= double(B - 1);
                const double half = tq * std::sqrt(var / double(B));
                if (ip < P) {
                    est.estimates[ip](it, ix) = mean;
                    est.ci_half[ip](it, ix) = half;
                } else {
                    est.mean_field(it, ix) = mean;
                    est.mean_se(it, ix) = std::sqrt(var / double(B));
                }
            }
        }
    }
    return est;
}

// ---------------------------------------------------------------------------

RenewalResult renewal_second_moment(const spectral::SpectralBasis& basis, double xi,
                                    const covariance::SpatialKernel& spatial,
                                    const Eigen::VectorXd& u0_grid, double dt,
                                    const std::vector<int>& snapshot_steps) {
    if (spatial.kind != covariance::SpatialKind::riesz)
        throw std::invalid_argument("renewal_second_moment: riesz spatial kernel required");
    if (!(dt > 0.0)) throw std::invalid_argument("renewal_second_moment: dt > 0");

    const int N = basis.N, M = basis.M;
    const double h = basis.cell_width();

    Eigen::MatrixXd lambda(M, M);
    for (int j = 0; j < M; ++j)
        for (int l = 0; l <= j; ++l) {
            const double v =
                noise::riesz_cell_average(basis.nodes[j] - basis.nodes[l], h, spatial.beta);
            lambda(j, l) = v;
            lambda(l, j) = v;
        }

    Eigen::VectorXd estep(N);
    for (int n = 0; n < N; ++n) estep[n] = std::exp(-basis.eigenvalues[n] * dt);
    const Eigen::MatrixXd wphi = basis.weights.asDiagonal() * basis.phi;  // M x N

    RenewalResult out;
    out.dt = dt;
    out.snapshot_steps = snapshot_steps;
    std::sort(out.snapshot_steps.begin(), out.snapshot_steps.end());

    const Eigen::VectorXd a0 = spectral::project(basis, u0_grid);
    Eigen::MatrixXd mom = a0 * a0.transpose();
    double log_scale = 0.0;
    const double xi2dt = xi * xi * dt;

    std::size_t snap = 0;
    auto record = [&](int step) {
        while (snap < out.snapshot_steps.size() && out.snapshot_steps[snap] == step) {
            out.t_grid.push_back(step * dt);
            out.log_scale.push_back(log_scale);
            out.second_moment.push_back(mom);
            ++snap;
        }
    };
    record(0);
    const int K = out.snapshot_steps.empty() ? 0 : out.snapshot_steps.back();
    Eigen::MatrixXd field(M, M), proj(N, N);
    for (int k = 1; k <= K; ++k) {
        if (xi != 0.0) {
            field.noalias() = basis.phi * mom * basis.phi.transpose();
            field.array() *= lambda.array();
            proj.noalias() = wphi.transpose() * field * wphi;
            mom += xi2dt * proj;
        }
        mom = estep.asDiagonal() * mom * estep.asDiagonal();
        const double mx = mom.cwiseAbs().maxCoeff();
        if (mx > 1e100) {
            mom /= mx;
            log_scale += std::log(mx);
        }
        record(k);
    }
    return out;
}

double renewal_value(const spectral::SpectralBasis& basis, const RenewalResult& r,
                     int i, double x, double w) {
    const Eigen::VectorXd px = spectral::eigenfunction_row(basis, x);
    const Eigen::VectorXd pw = spectral::eigenfunction_row(basis, w);
    return std::exp(r.log_scale[i]) * px.dot(r.second_moment[i] * pw);
}

double renewal_log_diag(const spectral::SpectralBasis& basis, const RenewalResult& r,
                        int i, double x) {
    const Eigen::VectorXd px = spectral::eigenfunction_row(basis, x);
    const double v = px.dot(r.second_moment[i] * px);
    if (!(v > 0.0))
        throw std::runtime_error("renewal_log_diag: non-positive diagonal value");
    return r.log_scale[i] + std::log(v);
}

// ---------------------------------------------------------------------------

SeriesValue picard_lower_series(double t, double xi, double l_sigma, double C,
                                double c, double mu1, double alpha, double beta,
                                int n_max) {
    if (n_max < 1) throw std::invalid_argument("picard_lower_series: n_max >= 1");
    if (!(C > 0.0) || !(c > 0.0))
        throw std::invalid_argument("picard_lower_series: constants must be positive");
    SeriesValue out;
    if (xi == 0.0 || t <= 0.0) return out;

    const double ups = (alpha - beta) / alpha;
    const double base = 2.0 * std::log(C * xi * l_sigma);
    double log_max = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        const double lt = n * base + ups * (n * std::log(t) - std::lgamma(n + 1.0));
        logs.push_back(lt);
        log_max = std::max(log_max, lt);
        out.terms_used = n;
        out.last_ratio = (n >= 2) ? std::exp(logs[n - 1] - logs[n - 2]) : 0.0;
        if (n >= 2 && out.last_ratio < 1e-12) break;
    }
    double s = 0.0;
    for (double lt : logs) s += std::exp(lt - log_max);
    out.log_value = std::log(c) - 2.0 * mu1 * t + log_max + std::log(s);
    out.value = std::exp(out.log_value);
    return out;
}

// ---------------------------------------------------------------------------

ChaosResult chaos_second_moment_fbm(const spectral::SpectralBasis& basis, double xi,
                                    const covariance::SpatialKernel& spatial,
                                    double H, const Eigen::VectorXd& u0_grid,
                                    double t, double x, const ChaosConfig& cfg) {
    if (cfg.n_max < 0 || cfg.n_max > 3 || cfg.n_min < 1)
        throw std::invalid_argument("chaos_second_moment_fbm: orders must satisfy 1 <= n_min, n_max <= 3");
    if (spatial.kind != covariance::SpatialKind::riesz)
        throw std::invalid_argument("chaos_second_moment_fbm: riesz spatial kernel required");
    const auto dal = covariance::dalang_check(spatial, basis.alpha, 1);
    if (!dal.holds)
        throw std::invalid_argument("chaos_second_moment_fbm: Dalang condition fails");
    if (!(H > 0.5) || !(H < 1.0))
        throw std::invalid_argument("chaos_second_moment_fbm: H in (1/2,1)");

    const double CH = H * (2.0 * H - 1.0);
    const double beta = spatial.beta;
    const double hcell = cfg.lambda_cell > 0.0 ? cfg.lambda_cell : basis.cell_width();
    const Eigen::VectorXd a0 = spectral::project(basis, u0_grid);

    ChaosResult res;
    {
        const Eigen::VectorXd rowx = spectral::eigenfunction_row(basis, x);
        const double g = decay_sum2(basis, t, a0.data(), rowx.data());
        res.g_squared = g * g;
    }
    res.total = res.g_squared;

    const int N = basis.N;
    Eigen::VectorXd rowx(N);
    fill_row(basis, x, rowx.data());

    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        const int B = std::max(2, cfg.batches);
        const std::uint64_t per_batch = std::max<std::uint64_t>(1, cfg.samples / B);
        const std::uint64_t S = per_batch * std::uint64_t(B);
        std::vector<double> batch_mean(B, 0.0);

        // log of the simplex-pair x box volume: (t^n/n!)^2 * 2^{2n}
        const double log_vol = 2.0 * (n * std::log(t) - std::lgamma(n + 1.0)) +
                               2.0 * n * std::log(2.0);
        const double vol = std::exp(log_vol);

        parallel_for(B, cfg.threads, [&](std::int64_t b) {
            NormalStream stream(cfg.seed, (cfg.job << 3) | std::uint64_t(n), 1);
            double ts[3], ss[3], xs[3], ys[3];
            std::vector<double> rowsx(std::size_t(3) * N), rowsy(std::size_t(3) * N);
            double acc = 0.0;
            const std::uint64_t lo = std::uint64_t(b) * per_batch;
            for (std::uint64_t s = lo; s < lo + per_batch; ++s) {
                const std::uint64_t u0i = s * std::uint64_t(4 * n);
                for (int i = 0; i < n; ++i) {
                    ts[i] = t * stream.uniform(u0i + i);
                    ss[i] = t * stream.uniform(u0i + n + i);
                    xs[i] = -1.0 + 2.0 * stream.uniform(u0i + 2 * n + i);
                    ys[i] = -1.0 + 2.0 * stream.uniform(u0i + 3 * n + i);
                }
                std::sort(ts, ts + n);
                std::sort(ss, ss + n);
                double f = 1.0;
                for (int line = 0; line < 2; ++line) {
                    const double* tt = line ? ss : ts;
                    const double* xx = line ? ys : xs;
                    std::vector<double>& rows = line ? rowsy : rowsx;
                    for (int i = 0; i < n; ++i) fill_row(basis, xx[i], rows.data() + i * N);
                    f *= decay_sum2(basis, t - tt[n - 1], rowx.data(),
                                    rows.data() + (n - 1) * N);
                    for (int i = n - 1; i >= 1; --i)
                        f *= decay_sum2(basis, tt[i] - tt[i - 1], rows.data() + i * N,
                                        rows.data() + (i - 1) * N);
                    f *= decay_sum2(basis, tt[0], a0.data(), rows.data());
                }
                for (int i = 0; i < n; ++i) {
                    const double lag = std::abs(ts[i] - ss[i]);
                    f *= (lag > 0.0) ? CH * std::pow(lag, 2.0 * H - 2.0) : 0.0;
                    f *= noise::riesz_cell_average(xs[i] - ys[i], hcell, beta);
                }
                acc += f;
            }
            batch_mean[b] = acc / double(per_batch);
        });

        double mean = 0.0;
        for (double m : batch_mean) mean += m;
        mean /= double(B);
        double var = 0.0;
        for (double m : batch_mean) var += (m - mean) * (m - mean);
        var /= double(B - 1);

        ChaosTerm term;
        term.n = n;
        term.samples = S;
        const double xi2n = std::pow(xi, 2.0 * n);
        term.value = xi2n * vol * mean;
        term.mc_error = xi2n * vol * std::sqrt(var / double(B));
        term.low_precision = term.mc_error > 0.1 * std::abs(term.value);
        res.terms.push_back(term);
        res.total += term.value;
    }
    return res;
}

// ---------------------------------------------------------------------------

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = int(x.size());
    if (n < 2 || y.size() != x.size())
        throw std::invalid_argument("linear_fit: need >= 2 matched points");
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LinFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ssr += e * e;
    }
    f.r2 = (syy > 0.0) ? 1.0 - ssr / syy : 1.0;
    f.slope_se = (n > 2) ? std::sqrt(ssr / double(n - 2) / sxx) : 0.0;
    return f;
}

LinFit lyapunov_fit(const std::vector<double>& t, const std::vector<double>& log_m,
                    double window_lo, double window_hi) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window_lo || t[i] > window_hi) continue;
        if (!std::isfinite(log_m[i]))
            throw std::invalid_argument("lyapunov_fit: non-finite log moment in window");
        xs.push_back(t[i]);
        ys.push_back(log_m[i]);
    }
    if (xs.size() < 4)
        throw std::invalid_argument("lyapunov_fit: need >= 4 points in window");
    return linear_fit(xs, ys);
}

LinFit rho_fit(const std::vector<double>& t, const std::vector<double>& log_m) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(log_m[i] > 0.0))
            throw std::invalid_argument("rho_fit: log moment must be positive (growth regime)");
        xs.push_back(std::log(t[i]));
        ys.push_back(std::log(log_m[i]));
    }
    if (xs.size() < 4) throw std::invalid_argument("rho_fit: need >= 4 points");
    return linear_fit(xs, ys);
}

}  // namespace fshe::moments
