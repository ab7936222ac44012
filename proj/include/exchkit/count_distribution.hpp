#pragma once

// Exchangeable binary measures in their canonical count form, the derived
// per-configuration view, head probabilities, hypergeometric projection and
// the FKG lattice check.

#include "exchkit/numeric.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace exchkit {

template <class T>
T binom_factor(int n, int k) {
    return static_cast<T>(binomial_int(n, k).template convert_to<long double>());
}
template <>
inline Rational binom_factor<Rational>(int n, int k) {
    return Rational(binomial_int(n, k));
}

// Law of the number of 1's among n exchangeable binary sites.
// pi has length n+1, pi[k] >= 0, sum pi[k] = 1.
template <class T>
struct CountDistribution {
    int n = 0;
    std::vector<T> pi;

    CountDistribution() = default;
    CountDistribution(int n_, std::vector<T> pi_) : n(n_), pi(std::move(pi_)) {
        if (static_cast<int>(pi.size()) != n + 1) throw std::invalid_argument("pi must have n+1 entries");
    }

    bool valid(const Tol& tol = {}) const {
        if (static_cast<int>(pi.size()) != n + 1) return false;
        T sum(0);
        for (const T& p : pi) {
            if (fuzzy_sign(p, tol) < 0) return false;
            sum += p;
        }
        return fuzzy_sign(T(sum - T(1)), tol) == 0;
    }
};

// Per-configuration weights u[k] = pi[k] / C(n,k).
template <class T>
struct ConfigWeights {
    int n = 0;
    std::vector<T> u;
};

template <class T>
ConfigWeights<T> config_weights(const CountDistribution<T>& mu) {
    ConfigWeights<T> w{mu.n, std::vector<T>(mu.n + 1)};
    for (int k = 0; k <= mu.n; ++k) w.u[k] = mu.pi[k] / binom_factor<T>(mu.n, k);
    return w;
}

template <class T>
CountDistribution<T> count_from_config(const ConfigWeights<T>& w) {
    CountDistribution<T> mu;
    mu.n = w.n;
    mu.pi.resize(w.n + 1);
    for (int k = 0; k <= w.n; ++k) mu.pi[k] = w.u[k] * binom_factor<T>(w.n, k);
    return mu;
}

// mu_M(m) = sum_{m'} C(M,m) C(M'-M, m'-m) / C(M',m') * mu_{M'}(m').
template <class T>
CountDistribution<T> hypergeometric_project(const CountDistribution<T>& mu, int n) {
    const int l = mu.n;
    if (n < 1 || n > l) throw std::domain_error("hypergeometric_project: need 1 <= n <= l");
    CountDistribution<T> out;
    out.n = n;
    out.pi.assign(n + 1, T(0));
    for (int m = 0; m <= n; ++m) {
        for (int mp = m; mp <= l - (n - m); ++mp) {
            T coef = binom_factor<T>(n, m) * binom_factor<T>(l - n, mp - m) / binom_factor<T>(l, mp);
            out.pi[m] += coef * mu.pi[mp];
        }
    }
    return out;
}

template <class T>
T mean_density(const CountDistribution<T>& mu) {
    T mean(0);
    for (int k = 1; k <= mu.n; ++k) mean += T(k) * mu.pi[k];
    return mean / T(mu.n);
}

// Head probabilities v_k = P(X_1 = ... = X_k = 1) = sum_j C(n-k,j) u_{k+j}.
// v_0 = 1 for a probability measure.
template <class T>
std::vector<T> u_to_v(const ConfigWeights<T>& w) {
    const int n = w.n;
    std::vector<T> v(n + 1, T(0));
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n - k; ++j) v[k] += binom_factor<T>(n - k, j) * w.u[k + j];
    return v;
}

template <class T>
std::vector<T> head_probabilities(const CountDistribution<T>& mu) {
    return u_to_v(config_weights(mu));
}

// Inverse binomial transform: u_k = sum_j (-1)^j C(n-k,j) v_{k+j}.
template <class T>
ConfigWeights<T> v_to_u(const std::vector<T>& v) {
    const int n = static_cast<int>(v.size()) - 1;
    ConfigWeights<T> w{n, std::vector<T>(n + 1, T(0))};
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n - k; ++j) {
            T term = binom_factor<T>(n - k, j) * v[k + j];
            if (j % 2)
                w.u[k] -= term;
            else
                w.u[k] += term;
        }
    return w;
}

template <class T>
struct MomentsOf {
    std::vector<T> factorial;  // m_k = E N(N-1)...(N-k+1)
    std::vector<T> power;      // v_k = E N^k
};

// Factorial and power moments of the count variable, up to the given order.
template <class T>
MomentsOf<T> moments_from_count(const CountDistribution<T>& mu, int order) {
    MomentsOf<T> out;
    out.factorial.assign(order + 1, T(0));
    out.power.assign(order + 1, T(0));
    for (int k = 0; k <= order; ++k) {
        for (int j = 0; j <= mu.n; ++j) {
            T ff(1), pw(1);
            for (int i = 0; i < k; ++i) ff *= T(j - i);
            for (int i = 0; i < k; ++i) pw *= T(j);
            out.factorial[k] += ff * mu.pi[j];
            out.power[k] += pw * mu.pi[j];
        }
    }
    return out;
}

enum class FkgVerdict { Satisfied, Violated, Marginal };

struct FkgResult {
    FkgVerdict verdict = FkgVerdict::Satisfied;
    int k = -1;  // failing level for Violated
};

// FKG lattice condition mu(eta v delta) mu(eta ^ delta) >= mu(eta) mu(delta),
// reduced to adjacent-level log-convexity of the per-configuration weights:
// w_k^2 <= w_{k-1} w_{k+1} for 1 <= k <= n-1. The reduction is validated
// against the exhaustive pairwise check in the test suite (n <= 5). Under it,
// a measure whose support touches an interior level must have full support;
// the only other Satisfied patterns are supports inside {0, n}. Gaps show up
// as w_k > 0 with a vanishing neighbor product and are reported Violated.
template <class T>
FkgResult fkg_lattice_check(const CountDistribution<T>& mu, const Tol& tol = {}) {
    auto w = config_weights(mu);
    const int n = mu.n;
    bool marginal = false;
    for (int k = 1; k <= n - 1; ++k) {
        T lo = w.u[k - 1] * w.u[k + 1];
        T hi = w.u[k] * w.u[k];
        if (sign_of(lo) == 0 && sign_of(hi) == 0) continue;  // structurally zero levels
        T diff = lo - hi;
        // the band is relative to the two products being compared, so levels
        // with tiny probabilities are still resolved
        T scale = std::max<T>(abs_val(lo), hi);
        int s = fuzzy_sign(diff, tol, scale);
        if (s < 0) return {FkgVerdict::Violated, k};
        if (s == 0 && !is_exact_v<T>) marginal = true;
    }
    return {marginal ? FkgVerdict::Marginal : FkgVerdict::Satisfied, -1};
}

}  // namespace exchkit
