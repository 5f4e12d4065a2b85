#include "fshe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fshe::solver {

double SigmaSpec::operator()(double x) const {
    switch (kind) {
        case SigmaKind::identity: return x;
        case SigmaKind::linear: return lambda * x;
        case SigmaKind::sine_perturbed: return x + lambda * std::sin(x);
    }
    return x;
}

SigmaSpec SigmaSpec::identity() { return SigmaSpec{SigmaKind::identity, 0.0, 1.0, 1.0}; }

SigmaSpec SigmaSpec::linear(double lambda) {
    if (lambda == 0.0) throw std::domain_error("linear sigma requires lambda != 0");
    return SigmaSpec{SigmaKind::linear, lambda, std::abs(lambda), std::abs(lambda)};
}

SigmaSpec SigmaSpec::sine_perturbed(double lambda) {
    if (!(std::abs(lambda) < 1.0))
        throw std::domain_error("sine-perturbed sigma requires |lambda| < 1");
    return SigmaSpec{SigmaKind::sine_perturbed, lambda, 1.0 - std::abs(lambda),
                     1.0 + std::abs(lambda)};
}

FieldSample solve_path(const spectral::SpectralBasis& basis,
                       const covariance::NoiseSpec& noise_spec,
                       const noise::CovarianceFactor& space_factor,
                       const SigmaSpec& sigma, const Eigen::VectorXd& u0_grid,
                       const noise::NoiseGrid& grid, const SolveOptions& opts) {
    if (noise_spec.temporal.kind != covariance::TemporalKind::white)
        throw std::invalid_argument("solve_path: pathwise stepping requires white-in-time noise");
    const auto dalang =
        covariance::dalang_check(noise_spec.spatial, basis.alpha, 1);
    if (!dalang.holds)
        throw std::invalid_argument("solve_path: Dalang condition fails (" + dalang.rule + ")");
    if (grid.nodes.size() != basis.nodes.size())
        throw std::invalid_argument("solve_path: noise grid must match the basis grid");

    const int N = basis.N, M = basis.M, K = grid.steps;
    const double dt = grid.dt;
    constexpr double kBlowup = 1e12;

    Eigen::VectorXd estep(N);
    for (int n = 0; n < N; ++n)
        estep[n] = std::exp(-basis.eigenvalues[n] * dt);
    const Eigen::MatrixXd wphi = basis.weights.asDiagonal() * basis.phi;  // M x N

    FieldSample out;
    out.seed = opts.seed;
    out.replicate = opts.replicate;
    out.config_hash = opts.config_hash;
    out.snapshot_steps = opts.snapshot_steps;
    std::sort(out.snapshot_steps.begin(), out.snapshot_steps.end());
    out.coeffs.setZero(N, out.snapshot_steps.size());
    if (opts.record_grid_values) out.values.setZero(M, out.snapshot_steps.size());

    NormalStream stream(opts.seed, opts.replicate, /*tag=*/0);

    Eigen::VectorXd a = spectral::project(basis, u0_grid);
    Eigen::VectorXd u(M), v(M), dw(M);
    std::size_t snap = 0;
    auto record = [&](int step) {
        while (snap < out.snapshot_steps.size() && out.snapshot_steps[snap] == step) {
            out.coeffs.col(snap) = a;
            if (opts.record_grid_values) out.values.col(snap) = basis.phi * a;
            ++snap;
        }
    };
    record(0);

    for (int k = 0; k < K; ++k) {
        u.noalias() = basis.phi * a;
        if (u.cwiseAbs().maxCoeff() > kBlowup) {
            out.diverged = true;
            out.diverged_step = k;
            break;
        }
        if (noise_spec.xi != 0.0) {
            dw = noise::sample_white_time(space_factor, dt, stream, std::uint64_t(k));
            for (int j = 0; j < M; ++j) v[j] = noise_spec.xi * sigma(u[j]) * dw[j];
            a.noalias() += wphi.transpose() * v;
        }
        a.array() *= estep.array();
        record(k + 1);
    }
    if (out.diverged) {
        // remaining snapshots keep the last finite state; consumers check the flag
        for (; snap < out.snapshot_steps.size(); ++snap) out.coeffs.col(snap) = a;
    }
    return out;
}

double sample_value(const spectral::SpectralBasis& basis, const FieldSample& s,
                    int snapshot_index, double x) {
    const Eigen::VectorXd row = spectral::eigenfunction_row(basis, x);
    return row.dot(s.coeffs.col(snapshot_index));
}

AssumptionReport validate_assumptions(const spectral::SpectralBasis& basis,
                                      const Eigen::VectorXd& u0_grid, double eps,
                                      const SigmaSpec& sigma) {
    AssumptionReport rep;
    if (!(eps > 0.0) || !(eps < 0.5)) {
        rep.failures.push_back("eps must lie in (0, R/2) with R = 1");
        return rep;
    }
    if (u0_grid.size() != basis.nodes.size()) {
        rep.failures.push_back("u0 grid size mismatch");
        return rep;
    }
    rep.u0_min = u0_grid.minCoeff();
    rep.u0_max = u0_grid.maxCoeff();
    if (!u0_grid.allFinite()) rep.failures.push_back("u0 not finite");
    if (rep.u0_min < 0.0) rep.failures.push_back("u0 must be nonnegative");

    double inf_int = std::numeric_limits<double>::infinity();
    for (int j = 0; j < basis.M; ++j)
        if (std::abs(basis.nodes[j]) <= 1.0 - eps)
            inf_int = std::min(inf_int, u0_grid[j]);
    rep.u0_inf_interior = inf_int;
    if (!(inf_int > 0.0))
        rep.failures.push_back("inf of u0 over D_eps must be positive");

    rep.sigma_growth_ok = true;
    for (int i = -50; i <= 50; ++i) {
        const double x = 0.13 * i;
        const double s = std::abs(sigma(x)), ax = std::abs(x);
        if (s < sigma.l_sigma * ax - 1e-12 || s > sigma.L_sigma * ax + 1e-12) {
            rep.sigma_growth_ok = false;
            rep.failures.push_back("sigma growth bounds violated at x = " + std::to_string(x));
            break;
        }
    }
    rep.ok = rep.failures.empty();
    return rep;
}

}  // namespace fshe::solver
