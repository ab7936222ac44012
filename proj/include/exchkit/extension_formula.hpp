#pragma once

// The explicit extension Q(j) of Eq. (1.11), its oscillatory-integral twin,
// and the positivity certificate: alpha, beta, chi*, h*, the chi equation,
// c-tilde and the c < c-bar test.

#include "exchkit/numeric.hpp"
#include "exchkit/quadrature.hpp"

#include <mpfr.h>

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace exchkit {

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Z_n = sum_k C(n,k) exp{-(J/2)(2k-n)^2 + h(2k-n)}.
inline double log_z_n(int n, double J, double h) {
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(n + 1);
    for (int k = 0; k <= n; ++k) {
        double x = 2.0 * k - n;
        terms[k] = log_binomial(n, k) - 0.5 * J * x * x + h * x;
        mx = std::max(mx, terms[k]);
    }
    double acc = 0;
    for (double t : terms) acc += std::exp(t - mx);
    return mx + std::log(acc);
}

inline double z_n(int n, double J, double h) {
    if (!(J > 0)) throw std::domain_error("z_n: J > 0");
    return std::exp(log_z_n(n, J, h));
}

struct QVector {
    int n = 0;
    long l = 0;
    double J = 0, h = 0;
    std::vector<double> q;           // Q(0..l), signed
    std::vector<double> tail_bound;  // certified series truncation bound per entry
};

namespace detail {

// Minimal RAII handle for an mpfr_t at an explicit precision.
struct Mp {
    mpfr_t x;
    explicit Mp(mpfr_prec_t p) { mpfr_init2(x, p); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
    ~Mp() { mpfr_clear(x); }
};

struct SeriesResult {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;
    double log_tail = -std::numeric_limits<double>::infinity();
};

// Signed series sum_m C(-M, m) e^{-h B - (J/2) B^2}, B = B0 + 2m, in its
// uncompleted form (no e^{h^2/2J} prefactor). The alternating terms grow to a
// single hump and cancel massively for small J, so the sum runs in MPFR with
// rho = e^{-h}, gamma = e^{-J/2} formed once per precision and every term an
// integer-power product of them, maintained by two multiplications per step.
// Precision escalates until at least 60 significant bits of the sum survive
// the cancellation.
inline SeriesResult q_series(long M, long B0, double h, double J, double tau, long max_terms) {
    // hump detection in the log domain: the term ratio is monotone decreasing
    auto log_ratio = [&](long m) {
        return std::log(double(M + m) / double(m + 1)) - 2 * h - 2 * J * (B0 + 2 * m + 1);
    };
    long hump = 0;
    while (hump < max_terms && log_ratio(hump) >= 0) ++hump;
    if (hump >= max_terms) throw NonConvergence("q_series: hump not reached within term cap");

    const double log2tau = std::log2(tau);
    for (mpfr_prec_t prec = 128; prec <= 1 << 16; prec *= 2) {
        Mp rho(prec), gamma(prec), rho2(prec), gamma8(prec), gfac(prec), t(prec), s(prec), tmp(prec);
        mpfr_set_d(tmp.x, -h, MPFR_RNDN);
        mpfr_exp(rho.x, tmp.x, MPFR_RNDN);
        mpfr_set_d(tmp.x, -0.5 * J, MPFR_RNDN);
        mpfr_exp(gamma.x, tmp.x, MPFR_RNDN);
        mpfr_sqr(rho2.x, rho.x, MPFR_RNDN);
        mpfr_pow_si(gamma8.x, gamma.x, 8, MPFR_RNDN);
        // t_0 = rho^{B0} gamma^{B0^2}; gfac_0 = gamma^{4 B0 + 4}
        mpfr_pow_si(t.x, rho.x, B0, MPFR_RNDN);
        mpfr_pow_si(tmp.x, gamma.x, B0 * B0, MPFR_RNDN);
        mpfr_mul(t.x, t.x, tmp.x, MPFR_RNDN);
        mpfr_pow_si(gfac.x, gamma.x, 4 * B0 + 4, MPFR_RNDN);
        mpfr_set_zero(s.x, 1);

        mpfr_exp_t peak_exp = mpfr_get_exp(t.x);
        SeriesResult out;
        bool done = false;
        for (long m = 0;; ++m) {
            if (m > max_terms) throw NonConvergence("q_series: term cap exceeded");
            if (m % 2)
                mpfr_sub(s.x, s.x, t.x, MPFR_RNDN);
            else
                mpfr_add(s.x, s.x, t.x, MPFR_RNDN);
            if (mpfr_sgn(t.x) != 0) peak_exp = std::max(peak_exp, mpfr_get_exp(t.x));
            // t_{m+1} = t_m (M+m)/(m+1) rho^2 gamma^{4 B_m + 4}
            mpfr_mul_si(t.x, t.x, M + m, MPFR_RNDN);
            mpfr_div_si(t.x, t.x, m + 1, MPFR_RNDN);
            mpfr_mul(t.x, t.x, rho2.x, MPFR_RNDN);
            mpfr_mul(t.x, t.x, gfac.x, MPFR_RNDN);
            mpfr_mul(gfac.x, gfac.x, gamma8.x, MPFR_RNDN);
            if (m >= hump && log_ratio(m) <= -M_LN2 && mpfr_sgn(s.x) != 0 && mpfr_sgn(t.x) != 0 &&
                mpfr_get_exp(t.x) < mpfr_get_exp(s.x) + log2tau - 1) {
                mpfr_abs(tmp.x, t.x, MPFR_RNDN);
                mpfr_log(tmp.x, tmp.x, MPFR_RNDN);
                out.log_tail = mpfr_get_d(tmp.x, MPFR_RNDN) + M_LN2;
                done = true;
                break;
            }
            if (mpfr_sgn(t.x) == 0) {  // term underflowed even in MPFR range
                out.log_tail = -std::numeric_limits<double>::infinity();
                done = true;
                break;
            }
        }
        if (!done) continue;
        if (mpfr_sgn(s.x) == 0) return out;  // exact cancellation
        if (peak_exp - mpfr_get_exp(s.x) > prec - 60 && prec < (1 << 16)) continue;  // escalate
        out.sign = mpfr_sgn(s.x) > 0 ? 1 : -1;
        mpfr_abs(tmp.x, s.x, MPFR_RNDN);
        mpfr_log(tmp.x, tmp.x, MPFR_RNDN);
        out.log_abs = mpfr_get_d(tmp.x, MPFR_RNDN);
        return out;
    }
    throw NonConvergence("q_series: precision cap exceeded");
}

}  // namespace detail

// Q(j) = e^{h^2/(2J)}/Z_n * C(l,j) * sum_m C(-(l-n), m) e^{-(J/2)(2m+2l-n-2j+h/J)^2},
// the candidate extension of the Curie-Weiss model with parameters (n, -J, h).
inline QVector q_extension(int n, long l, double J, double h, double tau = 1e-12, long max_terms = 1'000'000) {
    if (!(J > 0)) throw std::domain_error("q_extension: J > 0 required");
    if (l <= n) throw std::domain_error("q_extension: l > n required");
    QVector out;
    out.n = n;
    out.l = l;
    out.J = J;
    out.h = h;
    out.q.resize(l + 1);
    out.tail_bound.resize(l + 1);
    const long M = l - n;
    const double lz = log_z_n(n, J, h);
    for (long j = 0; j <= l; ++j) {
        long B0 = 2 * l - n - 2 * j;
        auto s = detail::q_series(M, B0, h, J, tau, max_terms);
        double log_pref = log_binomial(l, j) - lz;
        out.q[j] = s.sign == 0 ? 0.0 : s.sign * std::exp(log_pref + s.log_abs);
        out.tail_bound[j] = std::exp(log_pref + s.log_tail);
    }
    return out;
}

// Direct oscillatory-integral evaluation of the same quantity,
// Q~(j) = C(l,j)/Z_n * Int e^{(ix+h)(2j-l)} (e^{ix+h} + e^{-(ix+h)})^{n-l} f_J(x) dx.
// Requires h away from 0: the integrand's poles sit at distance h from the
// real axis. Returns the real part; the imaginary part is a diagnostic.
struct TildeQ {
    double value = 0;
    double imag = 0;
};

inline TildeQ tilde_q_integral(int n, long l, double J, double h, long j, double tol = 1e-12) {
    if (!(J > 0)) throw std::domain_error("tilde_q_integral: J > 0 required");
    if (h < 1e-3) throw std::domain_error("tilde_q_integral: h below the pole-proximity floor 1e-3");
    const double u = 2.0 * j - l;
    const double L = std::sqrt(2.0 * J * 41.0) + M_PI;
    const int panels = std::max<int>(24, static_cast<int>(std::abs(u) * L / M_PI) + 8);
    auto f = [&](double x) -> std::complex<double> {
        std::complex<double> ix(0.0, x);
        std::complex<double> w = std::exp(ix + h) + std::exp(-(ix + h));
        std::complex<double> osc = std::exp(ix * u);
        double gauss = std::exp(-0.5 * x * x / J) / std::sqrt(2.0 * M_PI * J);
        return osc * std::pow(w, double(n - l)) * gauss;
    };
    auto integral = integrate_adaptive(f, -L, L, tol, panels);
    double pref = std::exp(h * u + log_binomial(l, j) - log_z_n(n, J, h));
    return {pref * integral.real(), pref * integral.imag()};
}

// chi* = ln(sqrt(c) + sqrt(c-1)), i.e. cosh^2(chi*) = c, for c >= 1.
inline double chi_star(double c) {
    if (!(c >= 1)) throw std::domain_error("chi_star: c >= 1");
    return std::log(std::sqrt(c) + std::sqrt(c - 1));
}

inline double beta_fn(double c) {
    if (!(c > 1)) throw std::domain_error("beta_fn: defined only for c > 1");
    return std::log(std::sqrt(c) + std::sqrt(c - 1)) + c - std::sqrt(c * c - c);
}

inline double alpha_fn(double c) {
    if (!(c > 0)) throw std::domain_error("alpha_fn: c > 0");
    double t = 1.0 - std::exp(-1.0 / c);  // guarded in (0,1)
    double y = 1.0 / std::sqrt(t);
    double xi = std::log(y + std::sqrt(y * y - 1.0));
    return c + xi - c * std::tanh(xi);
}

// h*(c) per Thm 1.21: max{c, alpha} on (0,1], max{alpha, beta} on (1, 3/2),
// beta on [3/2, inf).
inline double h_star(double c) {
    if (!(c > 0)) throw std::domain_error("h_star: c > 0");
    if (c <= 1) return std::max(c, alpha_fn(c));
    if (c < 1.5) return std::max(alpha_fn(c), beta_fn(c));
    return beta_fn(c);
}

// Solves xi - c tanh(xi) = h - c v on xi > 0, taking the branch xi >= chi*
// for c > 1. Returns nullopt below the attainable minimum.
inline std::optional<double> solve_chi(double c, double h, double v) {
    if (!(c > 0)) throw std::domain_error("solve_chi: c > 0");
    const double target = h - c * v;
    auto f = [&](double xi) { return xi - c * std::tanh(xi); };
    double lo, hi;
    if (c <= 1) {
        if (!(target > 0)) return std::nullopt;
        lo = 0;
        hi = target + c + 1;
    } else {
        double xs = chi_star(c);
        double fmin = f(xs);  // = beta(c) - c
        if (target < fmin - 1e-15) return std::nullopt;
        if (target <= fmin) return xs;
        lo = xs;
        hi = xs + (target - fmin) + c + 1;
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    double xi = 0.5 * (lo + hi);
    // Newton polish
    for (int iter = 0; iter < 4; ++iter) {
        double den = 1.0 - c / (std::cosh(xi) * std::cosh(xi));
        if (den <= 0) break;
        xi -= (f(xi) - target) / den;
    }
    return xi;
}

// c~(eps) = sup{ c : inf_y e^{y^2/c} (1 - eps sin^2 y) = 1 }. Equals 1/eps
// for eps <= 2/3; otherwise bisected inside the (5.16) bracket
// [-1/ln(1-eps), min{-pi^2/(4 ln(1-eps)), 1/eps}].
inline double tilde_c(double eps) {
    if (eps < 0 || eps > 1) throw std::domain_error("tilde_c: eps in [0,1]");
    if (eps == 0) return std::numeric_limits<double>::infinity();
    if (eps == 1) return 0.0;
    if (eps <= 2.0 / 3.0) return 1.0 / eps;
    auto criterion = [&](double c) {
        // inf_y y^2/c + ln(1 - eps sin^2 y) >= 0; the infimum lives in
        // [0, Y] with e^{Y^2/c} (1-eps) = 1
        double Y = std::sqrt(-c * std::log1p(-eps)) + 0.1;
        const int grid = 6000;
        double best = 0, besty = 0;
        for (int i = 1; i <= grid; ++i) {
            double y = Y * i / grid;
            double s = std::sin(y);
            double g = y * y / c + std::log1p(-eps * s * s);
            if (g < best) {
                best = g;
                besty = y;
            }
        }
        // local refinement around the grid minimum
        double step = Y / grid;
        double a = std::max(0.0, besty - step), b = besty + step;
        for (int it = 0; it < 80; ++it) {
            double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            auto g = [&](double y) {
                double s = std::sin(y);
                return y * y / c + std::log1p(-eps * s * s);
            };
            if (g(m1) < g(m2))
                b = m2;
            else
                a = m1;
        }
        double ymin = 0.5 * (a + b);
        double s = std::sin(ymin);
        double gmin = std::min(best, ymin * ymin / c + std::log1p(-eps * s * s));
        return gmin >= -1e-14;
    };
    double lo = -1.0 / std::log1p(-eps);
    double hi = std::min(-M_PI * M_PI / (4.0 * std::log1p(-eps)), 1.0 / eps);
    if (!criterion(lo)) return lo;  // lower bound is always admissible up to roundoff
    for (int iter = 0; iter < 100; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (criterion(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

enum class CertifyResult { Certified, NotCertified, OutOfDomain };

struct Certificate {
    CertifyResult result = CertifyResult::OutOfDomain;
    double chi_bar = std::numeric_limits<double>::quiet_NaN();
    double c_bar = std::numeric_limits<double>::quiet_NaN();
};

// Lemma 5.2 test: chi-bar solves the chi equation at v = 1, c-bar is
// c~(1/cosh^2 chi-bar) and the certificate is c < c-bar. Certified implies
// Q >= 0 for J = c/l and all sufficiently large l.
inline Certificate positivity_certificate(double c, double h) {
    if (!(c > 0)) throw std::domain_error("positivity_certificate: c > 0");
    Certificate out;
    auto chib = solve_chi(c, h, 1.0);
    if (!chib) return out;
    out.chi_bar = *chib;
    double ch = std::cosh(*chib);
    out.c_bar = tilde_c(1.0 / (ch * ch));
    out.result = c < out.c_bar ? CertifyResult::Certified : CertifyResult::NotCertified;
    return out;
}

// The centered (5.4) integral
//   I(l) = Int (p e^{ix/sqrt l} + q e^{-ix/sqrt l})^n
//          (p e^{i 2q x/sqrt l} + q e^{-i 2p x/sqrt l})^{-l} phi_c(x) dx,
// which converges to 1/sqrt(1 - 4 p q c) as l grows (uniformly in v) whenever
// the domination condition c < c~(4pq) holds.
struct ShiftedForm {
    double value = 0;
    double imag = 0;
    double limit = 0;  // 1/sqrt(1 - 4 p q c)
};

inline ShiftedForm q_shifted_form_integral(int n, long l, double c, double h, double v, double tol = 1e-11) {
    auto chi = solve_chi(c, h, v);
    if (!chi) throw std::domain_error("q_shifted_form_integral: chi equation has no solution");
    double p = std::exp(*chi) / (2 * std::cosh(*chi));
    double q = 1 - p;
    double fourpq = 4 * p * q;
    double decay = (1.0 - fourpq * c) / (2 * c);  // limit integrand decay rate
    double margin = tilde_c(fourpq);
    if (margin > c) decay = std::max(decay, (margin - c) / (2 * c * margin));
    double L = std::sqrt(41.0 / decay) + M_PI;
    double sl = std::sqrt(double(l));
    auto f = [&](double x) -> std::complex<double> {
        std::complex<double> i(0, 1);
        std::complex<double> first = p * std::exp(i * (x / sl)) + q * std::exp(-i * (x / sl));
        std::complex<double> second = p * std::exp(i * (2 * q * x / sl)) + q * std::exp(-i * (2 * p * x / sl));
        double gauss = std::exp(-0.5 * x * x / c) / std::sqrt(2 * M_PI * c);
        return std::pow(first, n) * std::pow(second, double(-l)) * gauss;
    };
    int panels = std::max<int>(32, int(2 * L * sl / M_PI / 8));
    auto integral = integrate_adaptive(f, -L, L, tol, panels);
    ShiftedForm out;
    out.value = integral.real();
    out.imag = integral.imag();
    out.limit = 1.0 / std::sqrt(1.0 - fourpq * c);
    return out;
}

}  // namespace exchkit
