// 1-d quadrature helpers: adaptive Simpson for smooth integrands and
// tanh-sinh (double-exponential) rules for endpoint singularities.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fshe {

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f, double a,
                                 double b, double tol = 1e-10, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Tanh-sinh rule on (a,b); tolerates integrable singularities at both ends.
// Nodes never touch the endpoints.
inline double integrate_tanh_sinh(const std::function<double(double)>& f, double a,
                                  double b, int levels = 7) {
    const double c = 0.5 * (b - a), mid = 0.5 * (a + b);
    const double tmax = 3.7;  // |x-mid| within ~1e-16 of the endpoints beyond this
    double h = 1.0;
    double sum = 0.5 * 3.14159265358979323846 * f(mid);  // weight at u = 0
    double prev = 0.0;
    for (int lev = 0; lev < levels; ++lev) {
        double part = 0.0;
        // at level 0 take all multiples of h, afterwards only the odd ones
        for (double u = (lev == 0) ? h : 0.5 * h; u <= tmax; u += (lev == 0) ? h : h) {
            const double s = std::sinh(u);
            const double ch = std::cosh(u);
            const double x = std::tanh(0.5 * 3.14159265358979323846 * s);
            const double w =
                0.5 * 3.14159265358979323846 * ch /
                std::pow(std::cosh(0.5 * 3.14159265358979323846 * s), 2);
            const double xp = mid + c * x, xm = mid - c * x;
            if (xp < b) part += w * f(xp);
            if (xm > a) part += w * f(xm);
        }
        if (lev == 0) {
            sum += part;
            prev = c * h * sum;
        } else {
            sum += part;
            const double cur = c * (0.5 * h) * sum;
            // heuristically stop when successive refinements agree
            if (std::abs(cur - prev) <= 1e-13 * (std::abs(cur) + 1.0) && lev >= 3)
                return cur;
            prev = cur;
            h *= 0.5;
        }
    }
    return prev;
}

// Gauss-Legendre nodes/weights on [a,b] (Newton on Legendre polynomials).
struct GaussLegendre {
    std::vector<double> x, w;
    GaussLegendre(int n, double a, double b) {
        x.resize(n);
        w.resize(n);
        for (int i = 0; i < n; ++i) {
            double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = 0.5 * (a + b) - 0.5 * (b - a) * z;
            w[i] = (b - a) / ((1.0 - z * z) * pp * pp);
        }
    }
};

}  // namespace fshe
