#include "fshe/covariance.hpp"

#include <cmath>

#include "fshe/quadrature.hpp"

namespace fshe::covariance {

SpatialKernel SpatialKernel::make_white(int d) {
    SpatialKernel k;
    k.kind = SpatialKind::white;
    k.d = d;
    return k;
}

SpatialKernel SpatialKernel::make_riesz(double beta, int d) {
    if (!(beta > 0.0) || !(beta < double(d)))
        throw std::domain_error("riesz kernel requires 0 < beta < d");
    SpatialKernel k;
    k.kind = SpatialKind::riesz;
    k.beta = beta;
    k.d = d;
    return k;
}

SpatialKernel SpatialKernel::make_bessel(double eta, int d) {
    if (!(eta > 0.0)) throw std::domain_error("bessel kernel requires eta > 0");
    SpatialKernel k;
    k.kind = SpatialKind::bessel;
    k.bessel_eta = eta;
    k.d = d;
    return k;
}

SpatialKernel SpatialKernel::make_fractional(std::vector<double> hurst) {
    if (hurst.empty()) throw std::domain_error("fractional kernel needs indices");
    for (double h : hurst)
        if (!(h > 0.5) || !(h < 1.0))
            throw std::domain_error("fractional kernel requires H in (1/2, 1)");
    SpatialKernel k;
    k.kind = SpatialKind::fractional;
    k.hurst = std::move(hurst);
    k.d = int(k.hurst.size());
    return k;
}

TemporalKernel TemporalKernel::make_white() {
    TemporalKernel k;
    k.kind = TemporalKind::white;
    return k;
}

TemporalKernel TemporalKernel::make_fbm(double H) {
    if (!(H > 0.5) || !(H < 1.0))
        throw std::domain_error("fbm temporal kernel requires H in (1/2, 1)");
    TemporalKernel k;
    k.kind = TemporalKind::fbm;
    k.H = H;
    k.C_H = H * (2.0 * H - 1.0);
    return k;
}

PointwiseValue lambda_eval(const SpatialKernel& k, double r) {
    switch (k.kind) {
        case SpatialKind::white:
            return {true, 0.0};
        case SpatialKind::riesz:
            if (r == 0.0)
                throw std::domain_error("riesz kernel singular at r = 0; use cell averages");
            return {false, std::pow(std::abs(r), -k.beta)};
        case SpatialKind::bessel: {
            // Lambda(x) = int_0^inf y^{(eta-d)/2} e^{-y} e^{-|x|^2/(4y)} dy
            const double a = std::abs(r);
            const double p = (k.bessel_eta - k.d) / 2.0;
            const double v = integrate_tanh_sinh(
                [a, p](double y) {
                    return std::pow(y, p) * std::exp(-y - a * a / (4.0 * y));
                },
                1e-12, 60.0, 9);
            return {false, v};
        }
        case SpatialKind::fractional: {
            if (r == 0.0)
                throw std::domain_error("fractional kernel singular at r = 0");
            double v = 1.0;
            for (double h : k.hurst) v *= std::pow(std::abs(r), 2.0 * h - 2.0);
            return {false, v};
        }
    }
    return {true, 0.0};
}

PointwiseValue gamma_eval(const TemporalKernel& k, double r) {
    if (k.kind == TemporalKind::white) return {true, 0.0};
    if (r == 0.0) throw std::domain_error("fbm correlation singular at r = 0");
    return {false, k.C_H * std::pow(std::abs(r), 2.0 * k.H - 2.0)};
}

DalangResult dalang_check(const SpatialKernel& k, double alpha, int d) {
    switch (k.kind) {
        case SpatialKind::white:
            return {alpha > double(d), "white noise: holds iff alpha > d"};
        case SpatialKind::riesz:
            return {k.beta < alpha, "riesz(beta): holds iff beta < alpha"};
        case SpatialKind::bessel:
            return {k.bessel_eta > double(d) - alpha,
                    "bessel(eta): holds iff eta > d - alpha"};
        case SpatialKind::fractional: {
            double sum = 0.0;
            for (double h : k.hurst) sum += h;
            return {sum > double(d) - alpha / 2.0,
                    "fractional(H_i): holds iff sum H_i > d - alpha/2"};
        }
    }
    return {false, "?"};
}

double kappa(const TemporalKernel& k, double t) {
    if (k.kind == TemporalKind::white)
        throw std::domain_error("kappa undefined: white temporal kernel is not locally integrable");
    if (t < 0.0) throw std::domain_error("kappa: t >= 0");
    if (t == 0.0) return 0.0;
    return 2.0 * k.C_H * std::pow(t, 2.0 * k.H - 1.0) / (2.0 * k.H - 1.0);
}

double eta(const TemporalKernel& k, double t) {
    if (k.kind == TemporalKind::white)
        throw std::domain_error("eta undefined: white temporal kernel is not locally integrable");
    if (t < 0.0) throw std::domain_error("eta: t >= 0");
    if (t == 0.0) return 0.0;
    return k.C_H * std::pow(t / 3.0, 2.0 * k.H - 1.0) / (2.0 * k.H - 1.0);
}

}  // namespace fshe::covariance
