#pragma once

// Hankel positivity tests, bordered minors, Jacobi's quadratic-form
// decomposition, Sylvester's identity self-test, Stirling conversion
// matrices and the Vandermonde closed form for Curie-Weiss Hankel minors.

#include "exchkit/numeric.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace exchkit {

template <class T>
struct SymmetricMatrix {
    int dim = 0;
    std::vector<T> a;  // row-major, dim*dim

    SymmetricMatrix() = default;
    explicit SymmetricMatrix(int d) : dim(d), a(d * d, T(0)) {}

    T& at(int i, int j) { return a[i * dim + j]; }
    const T& at(int i, int j) const { return a[i * dim + j]; }

    void set_sym(int i, int j, const T& v) {
        at(i, j) = v;
        at(j, i) = v;
    }
};

// Plain Gaussian elimination with magnitude pivoting. Exact over Rational
// (field operations only), adequate in double for the small dims used here.
template <class T>
T determinant(std::vector<std::vector<T>> m) {
    const int d = static_cast<int>(m.size());
    if (d == 0) return T(1);
    T det(1);
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        T best(0);
        for (int r = c; r < d; ++r) {
            T mag = abs_val(m[r][c]);
            if (piv < 0 || mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (sign_of(m[piv][c]) == 0) return T(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < d; ++r) {
            if (sign_of(m[r][c]) == 0) continue;
            T f = m[r][c] / m[c][c];
            for (int cc = c; cc < d; ++cc) m[r][cc] -= f * m[c][cc];
        }
    }
    return det;
}

// Bordered minor c^k_{i,j}: determinant of the (k+1)x(k+1) matrix formed by
// rows {0..k-1, i} and columns {0..k-1, j}. c^{-1}_{-1,-1} is taken as 1.
template <class T>
T bordered_minor(const SymmetricMatrix<T>& c, int i, int j, int k) {
    if (k < 0) return T(1);
    if (k > i || k > j || i >= c.dim || j >= c.dim) throw std::out_of_range("bordered_minor: bad indices");
    std::vector<std::vector<T>> m(k + 1, std::vector<T>(k + 1));
    for (int r = 0; r <= k; ++r) {
        int row = (r < k) ? r : i;
        for (int s = 0; s <= k; ++s) {
            int col = (s < k) ? s : j;
            m[r][s] = c.at(row, col);
        }
    }
    return determinant(m);
}

template <class T>
T principal_minor(const SymmetricMatrix<T>& c, int k) {
    return bordered_minor(c, k, k, k);  // c^k_{k,k}, the leading (k+1)x(k+1) determinant
}

enum class Definiteness { PD, PSDSingular, Indefinite };

// Classification through the elementary symmetric functions of the (real)
// eigenvalues, e_k = sum of all k x k principal minors: all e_k > 0 iff PD,
// all e_k >= 0 iff PSD. In double, values within tau of zero relative to the
// accumulated minor magnitudes count as zero.
template <class T>
Definiteness classify_definiteness(const SymmetricMatrix<T>& c, const Tol& tol = {}) {
    const int d = c.dim;
    bool singular = false;
    std::vector<int> idx;
    for (int k = 1; k <= d; ++k) {
        T ek(0), scale(0);
        idx.assign(k, 0);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            std::vector<std::vector<T>> m(k, std::vector<T>(k));
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s) m[r][s] = c.at(idx[r], idx[s]);
            T det = determinant(m);
            ek += det;
            // zero-band relative to the summand size of the determinant, not
            // its (possibly cancelled) value
            T bound(1);
            for (int r = 0; r < k; ++r) {
                T rowmax(0);
                for (int s = 0; s < k; ++s) rowmax = std::max<T>(rowmax, abs_val(m[r][s]));
                bound *= T(k) * rowmax;
            }
            scale += bound;
            int pos = k - 1;
            while (pos >= 0 && idx[pos] == d - k + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
        }
        int s = fuzzy_sign(ek, tol, scale);
        if (s < 0) return Definiteness::Indefinite;
        if (s == 0) singular = true;
    }
    return singular ? Definiteness::PSDSingular : Definiteness::PD;
}

// Moment-matrix pair from (2.2) and its {0,..,l} variant. IE uses
// w_k = v_k - v_{k+1}; Discrete uses w_k = l v_k - v_{k+1}. For odd n the
// pair is the truncated-Hausdorff odd case, built from v_{i+j+1} and
// v_{i+j} - v_{i+j+1} (respectively l v_{i+j} - v_{i+j+1}).
struct HankelIE {};
struct HankelDiscrete {
    long l;
};
using HankelVariant = std::variant<HankelIE, HankelDiscrete>;

template <class T>
struct HankelPair {
    SymmetricMatrix<T> v_mat;
    SymmetricMatrix<T> w_mat;
    Definiteness v_verdict = Definiteness::PD;
    Definiteness w_verdict = Definiteness::PD;
};

template <class T>
HankelPair<T> hankel_pair(const std::vector<T>& v, const HankelVariant& variant, const Tol& tol = {}) {
    const int n = static_cast<int>(v.size()) - 1;
    if (n < 1) throw std::domain_error("hankel_pair: need n >= 1");
    T lfac(1);
    if (auto* d = std::get_if<HankelDiscrete>(&variant)) lfac = T(d->l);
    auto w = [&](int k) { return lfac * v[k] - v[k + 1]; };

    HankelPair<T> out;
    if (n % 2 == 0) {
        const int m = n / 2;
        out.v_mat = SymmetricMatrix<T>(m + 1);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) out.v_mat.at(i, j) = v[i + j];
        out.w_mat = SymmetricMatrix<T>(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out.w_mat.at(i, j) = w(i + j + 1);
    } else {
        const int m = (n - 1) / 2;
        out.v_mat = SymmetricMatrix<T>(m + 1);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) out.v_mat.at(i, j) = v[i + j + 1];
        out.w_mat = SymmetricMatrix<T>(m + 1);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) out.w_mat.at(i, j) = w(i + j);
    }
    out.v_verdict = classify_definiteness(out.v_mat, tol);
    if (out.w_mat.dim > 0) out.w_verdict = classify_definiteness(out.w_mat, tol);
    return out;
}

// G maps (1, l, l^2, ..., l^n) to the falling factorials and H = G^{-1};
// g_{i+1,j} = g_{i,j-1} - i g_{i,j}, h_{i+1,j} = h_{i,j-1} + j h_{i,j}.
// Entries are the signed Stirling numbers of the first kind and the Stirling
// numbers of the second kind.
inline std::pair<std::vector<std::vector<Int>>, std::vector<std::vector<Int>>> stirling_matrices(int n) {
    if (n < 1) throw std::domain_error("stirling_matrices: need n >= 1");
    std::vector<std::vector<Int>> g(n + 1, std::vector<Int>(n + 1, 0)), h = g;
    g[0][0] = 1;
    h[0][0] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i + 1; ++j) {
            g[i + 1][j] = (j > 0 ? g[i][j - 1] : Int(0)) - Int(i) * g[i][j];
            h[i + 1][j] = (j > 0 ? h[i][j - 1] : Int(0)) + Int(j) * h[i][j];
        }
    return {g, h};
}

struct SingularMinorError : std::domain_error {
    int k;
    explicit SingularMinorError(int k_)
        : std::domain_error("jacobi_decompose: zero principal minor at k=" + std::to_string(k_)), k(k_) {}
};

// One summand of Jacobi's formula (4.4):
//   [sum_{i>=k} c^k_{i,k} z_i]^2 / (c^k_{k,k} c^{k-1}_{k-1,k-1}).
template <class T>
struct JacobiTerm {
    int k = 0;
    std::vector<T> coeffs;  // c^k_{i,k} for i = k..n
    T den_k;                // c^k_{k,k}
    T den_km1;              // c^{k-1}_{k-1,k-1}
};

template <class T>
std::vector<JacobiTerm<T>> jacobi_decompose(const SymmetricMatrix<T>& c) {
    const int n = c.dim - 1;
    std::vector<JacobiTerm<T>> out;
    T prev(1);
    for (int k = 0; k <= n; ++k) {
        JacobiTerm<T> term;
        term.k = k;
        term.den_km1 = prev;
        term.den_k = principal_minor(c, k);
        if (sign_of(term.den_k) == 0) throw SingularMinorError(k);
        for (int i = k; i <= n; ++i) term.coeffs.push_back(bordered_minor(c, i, k, k));
        prev = term.den_k;
        out.push_back(std::move(term));
    }
    return out;
}

// Re-expands a decomposition into the matrix of the quadratic form it
// represents; used to verify (4.4) holds identically.
template <class T>
SymmetricMatrix<T> jacobi_expand(const std::vector<JacobiTerm<T>>& terms, int dim) {
    SymmetricMatrix<T> m(dim);
    for (const auto& t : terms) {
        T den = t.den_k * t.den_km1;
        for (int i = t.k; i < dim; ++i)
            for (int j = t.k; j < dim; ++j)
                m.at(i, j) += t.coeffs[i - t.k] * t.coeffs[j - t.k] / den;
    }
    return m;
}

// Sylvester identity (4.5):
// c^k_{k,k} c^k_{i,j} - c^k_{i,k} c^k_{k,j} = c^{k-1}_{k-1,k-1} c^{k+1}_{i,j},
// with c^{k+1}_{i,j} = 0 when k = min(i, j).
template <class T>
bool sylvester_check(const SymmetricMatrix<T>& c, int i, int j, int k) {
    if (k < 0 || k > i || k > j || i >= c.dim || j >= c.dim) throw std::out_of_range("sylvester_check: bad indices");
    T lhs = bordered_minor(c, k, k, k) * bordered_minor(c, i, j, k) -
            bordered_minor(c, i, k, k) * bordered_minor(c, k, j, k);
    T rhs = bordered_minor(c, k - 1, k - 1, k - 1);
    if (k == std::min(i, j))
        rhs *= T(0);
    else
        rhs *= bordered_minor(c, i, j, k + 1);
    return sign_of(T(lhs - rhs)) == 0;
}

// Closed form for the bordered Hankel minor det(u_{n-2k+i+j})_{i,j=0..k} of
// the Curie-Weiss weight sequence u_k = a^k b^{k(n-k)} / s_n:
//   a^{(k+1)(n-k)} b^{k(k+1)(3n-2k-1)/3} / s_n^{k+1}
//     * prod_{0 <= j < t <= k} (b^{-2t} - b^{-2j}).
// Strictly positive iff b < 1 (for k >= 1).
template <class T>
T binom_pow_term(const T& a, const T& b, int n, int k) {
    T r = static_cast<T>(binomial_int(n, k).template convert_to<long double>());
    return r * pow_n(a, k) * pow_n(b, static_cast<unsigned long>(k) * (n - k));
}
template <>
inline Rational binom_pow_term(const Rational& a, const Rational& b, int n, int k) {
    return Rational(binomial_int(n, k)) * pow_n(a, k) * pow_n(b, static_cast<unsigned long>(k) * (n - k));
}

template <class T>
T curie_weiss_s_n(const T& a, const T& b, int n) {
    T s(0);
    for (int k = 0; k <= n; ++k) s += binom_pow_term(a, b, n, k);
    return s;
}

template <class T>
T vandermonde_closed_form(const T& a, const T& b, int n, int k) {
    if (k < 0 || 2 * k > n) throw std::domain_error("vandermonde_closed_form: need 0 <= k <= n/2");
    T s = curie_weiss_s_n(a, b, n);
    long bexp = static_cast<long>(k) * (k + 1) * (3L * n - 2 * k - 1) / 3;
    T binv = T(1) / b;
    T result = pow_n(a, static_cast<unsigned long>(k + 1) * (n - k)) * pow_n(b, static_cast<unsigned long>(bexp)) /
               pow_n(s, static_cast<unsigned long>(k + 1));
    for (int j = 0; j <= k; ++j)
        for (int t = j + 1; t <= k; ++t) result *= pow_n(binv, 2UL * t) - pow_n(binv, 2UL * j);
    return result;
}

// det(seq[start + i + j])_{i,j = 0..size-1}; the direct route the closed
// form is checked against, and the two sides of the (2.3) = (2.4) identity.
template <class T>
T hankel_minor_from_sequence(const std::vector<T>& seq, int start, int size) {
    std::vector<std::vector<T>> m(size, std::vector<T>(size));
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) m[i][j] = seq[start + i + j];
    return determinant(m);
}

}  // namespace exchkit
