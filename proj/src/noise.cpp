#include "fshe/noise.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace fshe::noise {

NoiseGrid NoiseGrid::uniform(double dt, int steps, int cells) {
    if (!(dt > 0.0) || steps < 1 || cells < 1)
        throw std::invalid_argument("NoiseGrid: dt > 0, steps >= 1, cells >= 1");
    NoiseGrid g;
    g.dt = dt;
    g.steps = steps;
    g.nodes.resize(cells);
    g.widths.resize(cells);
    for (int j = 0; j < cells; ++j) {
        g.nodes[j] = -1.0 + (2.0 * j + 1.0) / cells;
        g.widths[j] = 2.0 / cells;
    }
    return g;
}

double riesz_cell_average(double r, double h, double beta) {
    // g'' = |r|^{-beta}; cell average = (g(r-h) - 2g(r) + g(r+h)) / h^2
    const double c = 1.0 / ((1.0 - beta) * (2.0 - beta));
    const auto g = [beta, c](double u) { return c * std::pow(std::abs(u), 2.0 - beta); };
    const double a = std::abs(r);
    return (g(a - h) - 2.0 * g(a) + g(a + h)) / (h * h);
}

double fbm_cell_average(double r, double dt, double H) {
    // with C_H = H(2H-1) the second antiderivative of gamma is |u|^{2H}/2
    const auto g = [H](double u) { return 0.5 * std::pow(std::abs(u), 2.0 * H); };
    const double a = std::abs(r);
    return (g(a - dt) - 2.0 * g(a) + g(a + dt)) / (dt * dt);
}

namespace {

// Cholesky with a jitter ladder; records the jitter actually applied.
void factorize(CovarianceFactor& f) {
    const int n = int(f.cov.rows());
    const double scale = f.cov.diagonal().maxCoeff();
    double jitter = 0.0;
    for (int attempt = 0; attempt < 9; ++attempt) {
        Eigen::MatrixXd c = f.cov;
        if (jitter > 0.0) c.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() == Eigen::Success) {
            f.factor = llt.matrixL();
            f.jitter = jitter;
            return;
        }
        jitter = (jitter == 0.0) ? 1e-14 * scale : 10.0 * jitter;
    }
    throw std::runtime_error("covariance factorization failed: matrix not PSD after jitter ladder (target " +
                             f.target + ", n=" + std::to_string(n) + ")");
}

}  // namespace

CovarianceFactor build_space_cov(const NoiseGrid& grid,
                                 const covariance::SpatialKernel& spatial) {
    if (spatial.kind != covariance::SpatialKind::riesz)
        throw std::invalid_argument("build_space_cov: only the riesz kernel is wired into simulation");
    const int m = int(grid.nodes.size());
    CovarianceFactor f;
    f.target = "riesz(beta=" + std::to_string(spatial.beta) + ") cell-averaged";
    f.cov.resize(m, m);
    for (int j = 0; j < m; ++j) {
        for (int l = 0; l <= j; ++l) {
            // uniform widths assumed equal for the pairwise average
            const double h = grid.widths[j];
            const double v =
                riesz_cell_average(grid.nodes[j] - grid.nodes[l], h, spatial.beta);
            f.cov(j, l) = v;
            f.cov(l, j) = v;
        }
    }
    factorize(f);
    return f;
}

CovarianceFactor build_spacetime_cov(const NoiseGrid& grid,
                                     const covariance::SpatialKernel& spatial,
                                     const covariance::TemporalKernel& temporal) {
    if (temporal.kind != covariance::TemporalKind::fbm)
        throw std::invalid_argument("build_spacetime_cov: temporal kernel must be fbm");
    const int m = int(grid.nodes.size());
    const long side = long(grid.steps) * m;
    if (side > 20000)
        throw std::invalid_argument("build_spacetime_cov: steps * cells exceeds the dense cap (20000)");

    CovarianceFactor sp = build_space_cov(grid, spatial);

    Eigen::MatrixXd tcov(grid.steps, grid.steps);
    for (int i = 0; i < grid.steps; ++i)
        for (int k = 0; k <= i; ++k) {
            const double v = fbm_cell_average((i - k) * grid.dt, grid.dt, temporal.H);
            tcov(i, k) = v;
            tcov(k, i) = v;
        }
    CovarianceFactor tf;
    tf.target = "fbm(H=" + std::to_string(temporal.H) + ") increment blocks";
    tf.cov = tcov;
    factorize(tf);

    // Kronecker assembly: cov = T (x) C, factor = L_T (x) L_C (lower
    // triangular, reproduces the target exactly up to the block jitters)
    CovarianceFactor f;
    f.target = tf.target + " (x) " + sp.target;
    f.cov.resize(side, side);
    f.factor.setZero(side, side);
    for (int i = 0; i < grid.steps; ++i)
        for (int k = 0; k < grid.steps; ++k) {
            f.cov.block(i * m, k * m, m, m) = tcov(i, k) * sp.cov;
            if (tf.factor(i, k) != 0.0)
                f.factor.block(i * m, k * m, m, m) = tf.factor(i, k) * sp.factor;
        }
    f.jitter = tf.jitter * sp.cov.diagonal().maxCoeff() +
               sp.jitter * tcov.diagonal().maxCoeff();
    return f;
}

Eigen::VectorXd sample_white_time(const CovarianceFactor& f, double dt,
                                  const NormalStream& stream, std::uint64_t step) {
    const int m = int(f.factor.rows());
    Eigen::VectorXd z(m);
    const std::uint64_t base = step * std::uint64_t(m);
    for (int j = 0; j < m; ++j) z[j] = stream.normal(base + j);
    return std::sqrt(dt) * (f.factor * z);
}

Eigen::VectorXd sample_spacetime(const CovarianceFactor& f,
                                 const NormalStream& stream, std::uint64_t index) {
    const int n = int(f.factor.rows());
    Eigen::VectorXd z(n);
    const std::uint64_t base = index * std::uint64_t(n);
    for (int j = 0; j < n; ++j) z[j] = stream.normal(base + j);
    return f.factor * z;
}

}  // namespace fshe::noise
