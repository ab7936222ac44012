#pragma once

// Gauss-Hermite rules and adaptive Simpson panels (with the usual Richardson
// error estimate) for the oscillatory integrals in the extension formula.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace exchkit {

struct GaussHermite {
    std::vector<double> nodes;    // roots of H_n
    std::vector<double> weights;  // for integrals against e^{-x^2}
};

// Newton iteration on the orthonormal Hermite recurrence.
inline GaussHermite gauss_hermite(int n) {
    if (n < 1) throw std::domain_error("gauss_hermite: n >= 1");
    GaussHermite out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * out.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * out.nodes[1];
        else
            z = 2.0 * z - out.nodes[i - 2];
        double pp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        out.nodes[i] = z;
        out.nodes[n - 1 - i] = -z;
        out.weights[i] = 2.0 / (pp * pp);
        out.weights[n - 1 - i] = out.weights[i];
    }
    return out;
}

// E f(xi) for xi ~ N(mean, var) by an n-node rule.
inline double gauss_hermite_expectation(const std::function<double(double)>& f, double mean, double var, int n) {
    auto gh = gauss_hermite(n);
    const double s = std::sqrt(2.0 * var);
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += gh.weights[i] * f(mean + s * gh.nodes[i]);
    return acc / std::sqrt(M_PI);
}

namespace detail {

using CF = std::function<std::complex<double>(double)>;

inline std::complex<double> simpson(const CF& f, double a, double b, std::complex<double> fa,
                                    std::complex<double> fm, std::complex<double> fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline std::complex<double> adapt(const CF& f, double a, double b, std::complex<double> fa, std::complex<double> fm,
                                  std::complex<double> fb, std::complex<double> whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    auto fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
    auto left = simpson(f, a, m, fa, fl, fm);
    auto right = simpson(f, m, b, fm, fr, fb);
    auto delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adapt(f, a, m, fa, fl, fm, left, tol / 2, depth - 1) +
           adapt(f, m, b, fm, fr, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

// Adaptive Simpson over [a, b] split into `panels` base intervals; `panels`
// should resolve the dominant oscillation.
inline std::complex<double> integrate_adaptive(const detail::CF& f, double a, double b, double tol = 1e-12,
                                               int panels = 16, int depth = 40) {
    std::complex<double> acc = 0;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double x0 = a + p * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        auto f0 = f(x0), fm = f(xm), f1 = f(x1);
        auto whole = detail::simpson(f, x0, x1, f0, fm, f1);
        acc += detail::adapt(f, x0, x1, f0, fm, f1, whole, tol / panels, depth);
    }
    return acc;
}

}  // namespace exchkit
