#pragma once

// Curie-Weiss and 3-body mean-field measures, the (a,b) <-> (J,h) bridge,
// Isingization, the log-convexity necessary condition and the n = 4 3-body
// closed form, plus the moment-generating (type 1) normal representation.

#include "exchkit/count_distribution.hpp"
#include "exchkit/linalg.hpp"
#include "exchkit/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace exchkit {

// Gibbs weights mu{eta} = a^k b^{k(n-k)} / s_n; a = e^{2h}, b = e^{-2J}.
template <class T>
struct CWParams {
    int n = 0;
    T a, b;
};

struct CWField {
    int n = 0;
    double J = 0, h = 0;
};

inline CWParams<double> cw_ab_from_field(const CWField& f) {
    return {f.n, std::exp(2 * f.h), std::exp(-2 * f.J)};
}
inline CWField cw_field_from_ab(int n, double a, double b) {
    return {n, -0.5 * std::log(b), 0.5 * std::log(a)};
}

template <class T>
struct CWGibbs {
    CountDistribution<T> counts;
    T s_n;
};

template <class T>
CWGibbs<T> cw_measure(const CWParams<T>& p) {
    if (!(p.a > T(0)) || !(p.b > T(0))) throw std::domain_error("cw_measure: a, b must be positive");
    CWGibbs<T> out;
    out.s_n = curie_weiss_s_n(p.a, p.b, p.n);
    out.counts.n = p.n;
    out.counts.pi.resize(p.n + 1);
    for (int k = 0; k <= p.n; ++k) out.counts.pi[k] = binom_pow_term(p.a, p.b, p.n, k) / out.s_n;
    return out;
}

// Log-domain evaluation for field parameters; safe for |J| n^2 large.
inline CountDistribution<double> cw_measure_field(const CWField& f) {
    const int n = f.n;
    std::vector<double> logit(n + 1);
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        double x = 2.0 * k - n;
        logit[k] = log_binomial(n, k) + f.h * x + 0.5 * f.J * x * x;
        mx = std::max(mx, logit[k]);
    }
    double z = 0;
    for (double v : logit) z += std::exp(v - mx);
    CountDistribution<double> out;
    out.n = n;
    out.pi.resize(n + 1);
    for (int k = 0; k <= n; ++k) out.pi[k] = std::exp(logit[k] - mx) / z;
    return out;
}

enum class ThreeBodyScaling { Unscaled, PerN, PerN2 };

// H = h sum sigma + J2/(2 s2) (sum sigma)^2 + J3/(6 s3) (sum sigma)^3 with
// (s2, s3) = (1,1), (n, n^2) or (n^2, n^3).
struct ThreeBodyParams {
    int n = 0;
    double h = 0, J2 = 0, J3 = 0;
    ThreeBodyScaling scaling = ThreeBodyScaling::Unscaled;
};

inline CountDistribution<double> three_body_measure(const ThreeBodyParams& p) {
    const int n = p.n;
    double s2 = 1, s3 = 1;
    if (p.scaling == ThreeBodyScaling::PerN) {
        s2 = n;
        s3 = double(n) * n;
    } else if (p.scaling == ThreeBodyScaling::PerN2) {
        s2 = double(n) * n;
        s3 = double(n) * n * n;
    }
    std::vector<double> logit(n + 1);
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        double x = 2.0 * k - n;
        logit[k] = log_binomial(n, k) + p.h * x + p.J2 / (2 * s2) * x * x + p.J3 / (6 * s3) * x * x * x;
        mx = std::max(mx, logit[k]);
    }
    double z = 0;
    for (double v : logit) z += std::exp(v - mx);
    CountDistribution<double> out;
    out.n = n;
    out.pi.resize(n + 1);
    for (int k = 0; k <= n; ++k) out.pi[k] = std::exp(logit[k] - mx) / z;
    return out;
}

// (J, h)-Isingization in multiplicative form: reweights pi_k by a^k b^{k(n-k)}
// (a = e^{2h}, b = e^{-2J}), which keeps rational inputs rational. T_{1,1} is
// the identity and T_{a,b} T_{a',b'} = T_{aa',bb'}.
template <class T>
CountDistribution<T> isingize_ab(const CountDistribution<T>& mu, const T& a, const T& b) {
    if (!(a > T(0)) || !(b > T(0))) throw std::domain_error("isingize_ab: a, b must be positive");
    CountDistribution<T> out;
    out.n = mu.n;
    out.pi.resize(mu.n + 1);
    T z(0);
    for (int k = 0; k <= mu.n; ++k) {
        out.pi[k] = mu.pi[k] * pow_n(a, k) * pow_n(b, static_cast<unsigned long>(k) * (mu.n - k));
        z += out.pi[k];
    }
    for (auto& p : out.pi) p /= z;
    return out;
}

inline CountDistribution<double> isingize(const CountDistribution<double>& mu, double J, double h) {
    return isingize_ab(mu, std::exp(2 * h), std::exp(-2 * J));
}

struct LogConvexityResult {
    bool passes = true;
    int k = -1;  // failing level
};

// Necessary condition for type-1 IE: log(pi_k / C(n,k)) must have nonnegative
// second differences on an interval support (the grid restriction of a convex
// log-mgf). A gap inside the support fails at the gap. Measures supported
// inside {0, n} can be IE of type 2 and are outside this test's reach.
template <class T>
LogConvexityResult log_convexity_necessary(const CountDistribution<T>& mu, const Tol& tol = {}) {
    auto w = config_weights(mu);
    const int n = mu.n;
    int lo = 0, hi = n;
    while (lo <= n && sign_of(w.u[lo]) == 0) ++lo;
    while (hi >= 0 && sign_of(w.u[hi]) == 0) --hi;
    if (lo > hi) throw std::domain_error("log_convexity_necessary: zero measure");
    for (int k = lo; k <= hi; ++k)
        if (sign_of(w.u[k]) == 0) return {false, k};  // gap
    for (int k = lo + 1; k <= hi - 1; ++k) {
        T prod = w.u[k - 1] * w.u[k + 1];
        T sq = w.u[k] * w.u[k];
        T scale = std::max<T>(abs_val(prod), sq);
        if (fuzzy_sign(T(prod - sq), tol, scale) < 0) return {false, k};
    }
    return {true, -1};
}

// Same condition evaluated from the Hamiltonian's log-weights, which stays
// meaningful where the normalized probabilities underflow.
inline LogConvexityResult log_convexity_necessary(const ThreeBodyParams& p, const Tol& tol = {}) {
    const int n = p.n;
    double s2 = 1, s3 = 1;
    if (p.scaling == ThreeBodyScaling::PerN) {
        s2 = n;
        s3 = double(n) * n;
    } else if (p.scaling == ThreeBodyScaling::PerN2) {
        s2 = double(n) * n;
        s3 = double(n) * n * n;
    }
    auto logw = [&](int k) {
        double x = 2.0 * k - n;
        return p.h * x + p.J2 / (2 * s2) * x * x + p.J3 / (6 * s3) * x * x * x;
    };
    for (int k = 1; k <= n - 1; ++k) {
        double diff = logw(k - 1) + logw(k + 1) - 2 * logw(k);
        if (fuzzy_sign(diff, tol, std::abs(logw(k)) + 1) < 0) return {false, k};
    }
    return {true, -1};
}

// n = 4 with H = h sum sigma + J2 sum_{i<j} sigma_i sigma_j
//                            + J3 sum_{i<j<k} sigma_i sigma_j sigma_k.
// IE iff J2 >= 0 and cosh(8 J3) <= cosh(4 J2) - 2 e^{-8 J2} sinh^2(2 J2).
inline bool n4_three_body_ie(double h, double J2, double J3) {
    (void)h;  // the external field does not enter the criterion
    if (J2 < 0) return false;
    double s = std::sinh(2 * J2);
    return std::cosh(8 * J3) <= std::cosh(4 * J2) - 2 * std::exp(-8 * J2) * s * s;
}

// The same Hamiltonian in (1.6) power-sum form: sum_{i<j} = ((sum)^2 - n)/2
// and sum_{i<j<k} = ((sum)^3 - (3n-2) sum)/6, so the field shifts by
// -(3n-2)/6 * J3 while J2, J3 carry over.
inline CountDistribution<double> n4_three_body_measure(double h, double J2, double J3) {
    ThreeBodyParams p;
    p.n = 4;
    p.h = h - (10.0 / 6.0) * J3;
    p.J2 = J2;
    p.J3 = J3;
    p.scaling = ThreeBodyScaling::Unscaled;
    return three_body_measure(p);
}

struct Type1Rep {
    std::vector<double> u;  // E W^k (1-W)^{n-k}, k = 0..n
    bool converged = false;
    int nodes = 0;
};

// Prop 1.6 route: xi ~ N(h, J), Y the (2 cosh x)^n tilt of xi, and
// W = e^Y / (2 cosh Y). Then E W^k (1-W)^{n-k} = E e^{(2k-n) xi} / E (2 cosh xi)^n,
// evaluated by Gauss-Hermite with node doubling until successive grids agree.
inline Type1Rep type1_normal_representation(double J, double h, int n, double tau = 1e-10) {
    if (J < 0) throw std::domain_error("type1_normal_representation: J >= 0 required");
    Type1Rep out;
    out.u.assign(n + 1, 0.0);
    if (J == 0) {
        double rho = std::exp(h) / (2 * std::cosh(h));
        for (int k = 0; k <= n; ++k) out.u[k] = std::pow(rho, k) * std::pow(1 - rho, n - k);
        out.converged = true;
        return out;
    }
    std::vector<double> prev;
    for (int nodes = 40; nodes <= 1280; nodes *= 2) {
        double denom = gauss_hermite_expectation(
            [&](double x) { return std::pow(2 * std::cosh(x), n); }, h, J, nodes);
        std::vector<double> cur(n + 1);
        for (int k = 0; k <= n; ++k)
            cur[k] = gauss_hermite_expectation([&](double x) { return std::exp((2.0 * k - n) * x); }, h, J,
                                               nodes) /
                     denom;
        if (!prev.empty()) {
            double rel = 0;
            for (int k = 0; k <= n; ++k)
                rel = std::max(rel, std::abs(cur[k] - prev[k]) / std::max(1.0, std::abs(cur[k])));
            if (rel <= tau) {
                out.u = cur;
                out.converged = true;
                out.nodes = nodes;
                return out;
            }
        }
        prev = cur;
        out.u = cur;
        out.nodes = nodes;
    }
    return out;  // converged stays false
}

}  // namespace exchkit
