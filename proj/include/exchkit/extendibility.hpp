#pragma once

// Top-level infinite- and l-extendibility decisions, the closed-form small
// cases, the n = 2 exact condition for all l, and the asymptotic thresholds
// around b = 1 + c/l.

#include "exchkit/count_distribution.hpp"
#include "exchkit/curie_weiss.hpp"
#include "exchkit/linalg.hpp"
#include "exchkit/moment_feasibility.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace exchkit {

enum class IEVerdict { IE, NotIE, Marginal };

// Infinite extendibility via the truncated Hausdorff pair: both matrices PD
// is sufficient, a negative eigenvalue in either is disqualifying. Singular
// boundaries are confirmed through discrete feasibility of the l-rescaled
// moments (primal LP oracle) at l = 64, 128, 256; IE only if all succeed.
template <class T>
IEVerdict ie_check(const CountDistribution<T>& mu, const Tol& tol = {}) {
    auto v = u_to_v(config_weights(mu));
    auto hp = hankel_pair(v, HankelIE{}, tol);
    if (hp.v_verdict == Definiteness::Indefinite || hp.w_verdict == Definiteness::Indefinite)
        return IEVerdict::NotIE;
    if (hp.v_verdict == Definiteness::PD && hp.w_verdict == Definiteness::PD) return IEVerdict::IE;
    for (long l : {64L, 128L, 256L}) {
        std::vector<T> scaled(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = v[i] * pow_n(T(l), i);
        if (!lp_feasible_witness(scaled, l, tol)) return IEVerdict::Marginal;
    }
    return IEVerdict::IE;
}

enum class ExtendStatus { Extendible, NotExtendible, Marginal };

template <class T>
struct ExtendVerdict {
    ExtendStatus status = ExtendStatus::Marginal;
    std::optional<CountDistribution<T>> witness;    // law of N on {0..l}
    std::optional<ExtremalPolynomial> certificate;  // dual proof of infeasibility
    std::vector<T> factorial_targets;               // m_k = l(l-1)...(l-k+1) headprob_k
    std::vector<T> power_targets;                   // v_k = E N^k implied by (4.13)
};

template <class T>
struct ExtensionTargets {
    std::vector<T> factorial;
    std::vector<T> power;
};

// The (4.13) targets: factorial moments from the head probabilities, power
// moments through the Stirling H matrix.
template <class T>
ExtensionTargets<T> extension_moment_targets(const CountDistribution<T>& mu, long l) {
    const int n = mu.n;
    auto head = u_to_v(config_weights(mu));
    ExtensionTargets<T> out;
    out.factorial.assign(n + 1, T(0));
    for (int k = 0; k <= n; ++k) {
        T fall(1);
        for (int t = 0; t < k; ++t) fall *= T(l - t);
        out.factorial[k] = fall * head[k];
    }
    auto [g, h] = stirling_matrices(n);
    (void)g;
    out.power.assign(n + 1, T(0));
    for (int m = 0; m <= n; ++m)
        for (int k = 0; k <= m; ++k) out.power[m] += static_cast<T>(h[m][k].template convert_to<long double>()) * out.factorial[k];
    return out;
}

template <>
inline ExtensionTargets<Rational> extension_moment_targets(const CountDistribution<Rational>& mu, long l) {
    const int n = mu.n;
    auto head = u_to_v(config_weights(mu));
    ExtensionTargets<Rational> out;
    out.factorial.assign(n + 1, Rational(0));
    for (int k = 0; k <= n; ++k) {
        Rational fall(1);
        for (int t = 0; t < k; ++t) fall *= Rational(l - t);
        out.factorial[k] = fall * head[k];
    }
    auto [g, h] = stirling_matrices(n);
    (void)g;
    out.power.assign(n + 1, Rational(0));
    for (int m = 0; m <= n; ++m)
        for (int k = 0; k <= m; ++k) out.power[m] += Rational(h[m][k]) * out.factorial[k];
    return out;
}

template <class T>
ExtendVerdict<T> l_extendible(const CountDistribution<T>& mu, long l, const Tol& tol = {},
                              const Int& cap = Int(10'000'000)) {
    if (l <= mu.n) throw std::domain_error("l_extendible: need l > n");
    auto targets = extension_moment_targets(mu, l);
    auto verdict = discrete_moment_feasible(targets.power, l, tol, cap);
    ExtendVerdict<T> out;
    out.factorial_targets = targets.factorial;
    out.power_targets = targets.power;
    switch (verdict.status) {
        case Feasibility::Feasible:
            out.status = ExtendStatus::Extendible;
            out.witness = std::move(verdict.witness);
            break;
        case Feasibility::Infeasible:
            out.status = ExtendStatus::NotExtendible;
            out.certificate = std::move(verdict.certificate);
            break;
        case Feasibility::Marginal:
            out.status = ExtendStatus::Marginal;
            break;
    }
    return out;
}

// Exact condition (4.3) for n = 2 and arbitrary l:
// b <= min_{1 <= i < l-1} [ (l-i)/(2i) a + (i+1)/(2(l-i-1)) / a ].
template <class T>
bool n2_exact_condition(const T& a, const T& b, long l) {
    if (l < 3) throw std::domain_error("n2_exact_condition: need l >= 3");
    for (long i = 1; i < l - 1; ++i) {
        T bound = T(l - i) / T(2 * i) * a + T(i + 1) / T(2 * (l - i - 1)) / a;
        if (b > bound) return false;
    }
    return true;
}

// The six tabulated closed forms. Parameters with a > 1 map to 1/a through
// the global spin flip.
template <class T>
bool small_case_oracle(int n, long l, T a, const T& b) {
    if (!(a > T(0)) || !(b > T(0))) throw std::domain_error("small_case_oracle: a, b must be positive");
    if (a > T(1)) a = T(1) / a;
    if (n == 2 && l == 3) return b <= a + T(1) / a;
    if (n == 2 && l == 4) return b <= T(3) / T(2) * a + T(1) / T(2) / a;
    if (n == 2 && l == 5) {
        if (T(3) * a * a <= T(1)) return b <= T(2) * a + T(1) / T(3) / a;
        return b <= T(3) / T(4) * (a + T(1) / a);
    }
    if (n == 3 && l == 4) {
        if (a == T(1)) return true;  // n odd, l = n+1, h = 0: extendible for every b
        return b * b * a * (T(1) - a) <= T(1);
    }
    if (n == 3 && l == 5) {
        if (T(2) * a <= T(1)) return b * b * a * (T(2) - T(3) * a) <= T(1);
        return b * b * a * (T(2) - a) <= T(3);
    }
    if (n == 4 && l == 5) {
        if (b > a + T(1) / a) return false;
        // b in (0, b1] u [b2, a + 1/a] with b1 <= b2 the real roots of
        // a^4 - a^3 b^3 + a^2 b^4 - a b^3 + 1 = 0; equivalently the quartic
        // in b is nonnegative at b.
        T quartic = pow_n(a, 4) - pow_n(a, 3) * pow_n(b, 3) + a * a * pow_n(b, 4) - a * pow_n(b, 3) + T(1);
        return quartic >= T(0);
    }
    throw std::domain_error("small_case_oracle: unsupported (n, l)");
}

// Thm 1.15 threshold: c_crit = 1/(2 rho (1-rho)).
inline double c_crit(double rho) {
    if (!(rho > 0) || !(rho < 1)) throw std::domain_error("c_crit: rho in (0,1)");
    return 1.0 / (2.0 * rho * (1.0 - rho));
}

// Sufficient (and asymptotically necessary) n = 2 bound:
// b <= 1 + (1+a)^2 / (2a(l-1)).
inline double n2_sufficient_bound(double a, long l) {
    if (!(a > 0) || l < 2) throw std::domain_error("n2_sufficient_bound: a > 0, l >= 2");
    return 1.0 + (1.0 + a) * (1.0 + a) / (2.0 * a * (l - 1));
}

// Critical-window constant for rho = j/k along l = q (mod k):
// d_c = (rho(1-rho) + (m/k)^2) / (2 rho^2 (1-rho)^2) with jq = +-m (mod k).
inline double critical_window_dc(long j, long k, long q) {
    if (k <= 0 || j <= 0 || j >= k) throw std::domain_error("critical_window_dc: need 0 < j < k");
    if (gcd(Int(j), Int(k)) != 1) throw std::domain_error("critical_window_dc: j/k must be reduced");
    long r = (j * (q % k)) % k;
    if (r < 0) r += k;
    long m = std::min(r, k - r);
    double rho = double(j) / double(k);
    double mk = double(m) / double(k);
    return (rho * (1 - rho) + mk * mk) / (2 * rho * rho * (1 - rho) * (1 - rho));
}

// Centered-moment combination sum_m C(p,m) (-rho l)^{p-m} v_m used by the
// (4.20) trend tests and the critical-window diagnostic.
template <class T>
T centered_moment_sum(const std::vector<T>& v, int p, const T& rho_l) {
    T acc(0);
    for (int m = 0; m <= p; ++m) {
        T term = binom_factor<T>(p, m) * pow_n(T(-rho_l), p - m) * v[m];
        acc += term;
    }
    return acc;
}

template <class T>
struct SchwarzDiagnostic {
    T lhs;  // (E(N - rho l)^3)^2
    T rhs;  // E(N - rho l)^2 * E(N - rho l)^4
    bool violated = false;
};

// Diagnostic at the (4.25) critical window, b = 1 + 1/(2 rho(1-rho) l) + d/l^2:
// evaluates the Schwarz inequality between the implied centered moments.
// Reported, not asserted; a violation certifies non-extendibility for that l.
template <class T>
SchwarzDiagnostic<T> schwarz_critical_diagnostic(int n, const T& a, const T& d, long l) {
    if (n < 4) throw std::domain_error("schwarz_critical_diagnostic: needs n >= 4");
    T rho = a / (T(1) + a);
    T b = T(1) + T(1) / (T(2) * rho * (T(1) - rho) * T(l)) + d / (T(l) * T(l));
    auto cw = cw_measure(CWParams<T>{n, a, b});
    auto targets = extension_moment_targets(cw.counts, l);
    T rho_l = rho * T(l);
    T c2 = centered_moment_sum(targets.power, 2, rho_l);
    T c3 = centered_moment_sum(targets.power, 3, rho_l);
    T c4 = centered_moment_sum(targets.power, 4, rho_l);
    SchwarzDiagnostic<T> out{c3 * c3, c2 * c4, false};
    out.violated = out.lhs > out.rhs;
    return out;
}

}  // namespace exchkit
