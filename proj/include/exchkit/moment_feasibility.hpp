#pragma once

// The discrete finite moment problem on {0,...,l}: dual certificates from the
// enumeration of extremal nonnegative polynomials, an independent primal
// linear-feasibility oracle (exact phase-1 simplex), and the closed-form
// regions for n = 2, 3.

#include "exchkit/count_distribution.hpp"
#include "exchkit/numeric.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace exchkit {

// Degree-n integer polynomial, nonnegative on {0,...,l}, with n simple roots
// there: disjoint adjacent pairs {x_i, x_i+1} plus boundary roots (both of
// {0, l} for even n, one of them for odd n).
struct ExtremalPolynomial {
    int n = 0;
    long l = 0;
    std::vector<long> pair_roots;  // left ends x_i of the adjacent pairs
    bool root_at_zero = false;
    bool root_at_l = false;
    std::vector<Int> coeffs;  // c_0..c_n

    Int evaluate(long x) const {
        Int acc = 0;
        for (int i = n; i >= 0; --i) acc = acc * x + coeffs[i];
        return acc;
    }
};

namespace detail {

inline ExtremalPolynomial build_extremal(int n, long l, const std::vector<long>& pairs, bool at_zero, bool at_l) {
    ExtremalPolynomial p;
    p.n = n;
    p.l = l;
    p.pair_roots = pairs;
    p.root_at_zero = at_zero;
    p.root_at_l = at_l;
    std::vector<long> roots;
    if (at_zero) roots.push_back(0);
    if (at_l) roots.push_back(l);
    for (long x : pairs) {
        roots.push_back(x);
        roots.push_back(x + 1);
    }
    p.coeffs.assign(n + 1, 0);
    p.coeffs[0] = 1;
    int deg = 0;
    for (long r : roots) {
        for (int i = deg; i >= 0; --i) {
            p.coeffs[i + 1] += p.coeffs[i];
            p.coeffs[i] *= -r;
        }
        ++deg;
    }
    // A root at l flips the sign of the monic product on the grid.
    if (at_l)
        for (auto& c : p.coeffs) c = -c;
    return p;
}

// Streams every placement of `count` disjoint adjacent pairs with left ends
// in [lo, hi], in lexicographic order.
inline void for_each_pair_placement(int count, long lo, long hi, std::vector<long>& pairs,
                                    const std::function<void(const std::vector<long>&)>& fn) {
    if (count == 0) {
        fn(pairs);
        return;
    }
    for (long x = lo; x + 2 * (count - 1) <= hi; ++x) {
        pairs.push_back(x);
        for_each_pair_placement(count - 1, x + 2, hi, pairs, fn);
        pairs.pop_back();
    }
}

}  // namespace detail

// Number of ways to place p disjoint dominoes on m consecutive cells.
inline Int count_pair_placements(long m, int p) {
    if (p < 0 || 2 * p > m) return 0;
    return binomial_int(m - p, p);
}

inline Int count_extremal(int n, long l) {
    if (n % 2 == 0) {
        int p = n / 2;
        return count_pair_placements(l + 1, p) + (p >= 1 ? count_pair_placements(l - 1, p - 1) : Int(0));
    }
    int p = (n - 1) / 2;
    return 2 * count_pair_placements(l, p);
}

struct EnumerationCapExceeded : std::runtime_error {
    Int count;
    explicit EnumerationCapExceeded(Int c)
        : std::runtime_error("extremal enumeration would produce " + c.str() +
                             " polynomials; use the LP-only path"),
          count(std::move(c)) {}
};

// Canonical order: pair placements lexicographically, boundary cases last.
inline void for_each_extremal(int n, long l, const std::function<void(const ExtremalPolynomial&)>& fn) {
    if (n < 1 || n > l) throw std::domain_error("for_each_extremal: need 1 <= n <= l");
    std::vector<long> pairs;
    if (n % 2 == 0) {
        int p = n / 2;
        detail::for_each_pair_placement(p, 0, l - 1, pairs, [&](const std::vector<long>& ps) {
            fn(detail::build_extremal(n, l, ps, false, false));
        });
        detail::for_each_pair_placement(p - 1, 1, l - 2, pairs, [&](const std::vector<long>& ps) {
            fn(detail::build_extremal(n, l, ps, true, true));
        });
    } else {
        int p = (n - 1) / 2;
        detail::for_each_pair_placement(p, 1, l - 1, pairs, [&](const std::vector<long>& ps) {
            fn(detail::build_extremal(n, l, ps, true, false));
        });
        detail::for_each_pair_placement(p, 0, l - 2, pairs, [&](const std::vector<long>& ps) {
            fn(detail::build_extremal(n, l, ps, false, true));
        });
    }
}

inline std::vector<ExtremalPolynomial> enumerate_extremal(int n, long l, const Int& cap = Int(10'000'000)) {
    Int total = count_extremal(n, l);
    if (total > cap) throw EnumerationCapExceeded(total);
    std::vector<ExtremalPolynomial> out;
    out.reserve(total.convert_to<std::size_t>());
    for_each_extremal(n, l, [&](const ExtremalPolynomial& p) { out.push_back(p); });
    return out;
}

template <class T>
T extremal_pairing(const ExtremalPolynomial& p, const std::vector<T>& v) {
    T acc(0);
    for (int i = 0; i <= p.n; ++i) acc += static_cast<T>(p.coeffs[i].template convert_to<long double>()) * v[i];
    return acc;
}
template <>
inline Rational extremal_pairing(const ExtremalPolynomial& p, const std::vector<Rational>& v) {
    Rational acc(0);
    for (int i = 0; i <= p.n; ++i) acc += Rational(p.coeffs[i]) * v[i];
    return acc;
}

enum class Feasibility { Feasible, Infeasible, Marginal };

template <class T>
struct FeasibilityVerdict {
    Feasibility status = Feasibility::Feasible;
    std::optional<CountDistribution<T>> witness;      // q on {0..l} reproducing v
    std::optional<ExtremalPolynomial> certificate;    // pairing < 0 proves infeasibility
};

// Primal oracle: q >= 0 on {0..l} with sum_j q_j j^i = v_i for i = 0..n, via
// phase-1 simplex with Bland's rule (exact over Rational, no cycling).
template <class T>
std::optional<std::vector<T>> lp_feasible_witness(const std::vector<T>& v, long l, const Tol& tol = {}) {
    const int n = static_cast<int>(v.size()) - 1;
    const int rows = n + 1;
    const long structural = l + 1;
    const long cols = structural + rows;  // + artificials

    // tableau[r] = constraint row, tableau[rows] = phase-1 objective row,
    // column `cols` holds the right-hand side.
    std::vector<std::vector<T>> tab(rows + 1, std::vector<T>(cols + 1, T(0)));
    for (int i = 0; i < rows; ++i) {
        int flip = sign_of(v[i]) < 0 ? -1 : 1;
        for (long j = 0; j <= l; ++j) {
            T powv(1);
            for (int t = 0; t < i; ++t) powv *= T(j);
            tab[i][j] = flip < 0 ? T(-powv) : powv;
        }
        tab[i][structural + i] = T(1);
        tab[i][cols] = flip < 0 ? T(-v[i]) : v[i];
    }
    for (long j = 0; j <= cols; ++j) {
        T s(0);
        for (int i = 0; i < rows; ++i) s += tab[i][j];
        tab[rows][j] = s;  // reduced costs of minimizing sum of artificials
    }
    for (int i = 0; i < rows; ++i) tab[rows][structural + i] = T(0);

    std::vector<long> basis(rows);
    for (int i = 0; i < rows; ++i) basis[i] = structural + i;

    T objscale(1);
    for (int i = 0; i < rows; ++i) objscale += abs_val(v[i]);
    const long max_iter = 50'000;
    for (long iter = 0; iter < max_iter; ++iter) {
        long enter = -1;
        for (long j = 0; j < structural; ++j)
            if (fuzzy_sign(tab[rows][j], tol, objscale) > 0) {
                enter = j;
                break;  // Bland: smallest improving index; artificials never re-enter
            }
        if (enter < 0) break;
        int leave = -1;
        T best(0);
        for (int i = 0; i < rows; ++i) {
            if (fuzzy_sign(tab[i][enter], tol, objscale) <= 0) continue;
            T ratio = tab[i][cols] / tab[i][enter];
            if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave < 0) return std::nullopt;  // unbounded: cannot happen for phase 1
        T piv = tab[leave][enter];
        for (long j = 0; j <= cols; ++j) tab[leave][j] /= piv;
        for (int r = 0; r <= rows; ++r) {
            if (r == leave) continue;
            T f = tab[r][enter];
            if (sign_of(f) == 0) continue;
            for (long j = 0; j <= cols; ++j) tab[r][j] -= f * tab[leave][j];
        }
        basis[leave] = enter;
    }
    if (fuzzy_sign(tab[rows][cols], tol, objscale) != 0) return std::nullopt;  // residual infeasibility

    std::vector<T> q(structural, T(0));
    for (int i = 0; i < rows; ++i)
        if (basis[i] < structural) q[basis[i]] = tab[i][cols];
    return q;
}

namespace detail {
struct stop_scan {};
}  // namespace detail

// Thm 1.16 decision: infeasible iff some extremal polynomial pairs negatively
// with (1, v_1, ..., v_n). Boundary pairings (exactly 0) count as feasible;
// in double mode a pairing inside the tau band yields Marginal. The exact
// path clears denominators once and evaluates pairings in integers.
template <class T>
FeasibilityVerdict<T> discrete_moment_feasible(const std::vector<T>& v, long l, const Tol& tol = {},
                                               const Int& cap = Int(10'000'000)) {
    const int n = static_cast<int>(v.size()) - 1;
    if (n < 1) throw std::domain_error("discrete_moment_feasible: need n >= 1");
    if (fuzzy_sign(T(v[0] - T(1)), tol) != 0) throw std::domain_error("discrete_moment_feasible: v_0 must be 1");
    if (n > l) throw std::domain_error("discrete_moment_feasible: need n <= l");
    Int total = count_extremal(n, l);
    if (total > cap) throw EnumerationCapExceeded(total);

    std::vector<Int> scaled;
    if constexpr (std::is_same_v<T, Rational>) {
        Int den = 1;
        for (const auto& x : v) den = lcm(den, denominator(x));
        for (const auto& x : v) scaled.push_back(numerator(x) * (den / denominator(x)));
    }

    FeasibilityVerdict<T> out;
    bool marginal = false;
    try {
        for_each_extremal(n, l, [&](const ExtremalPolynomial& p) {
            int s;
            if constexpr (std::is_same_v<T, Rational>) {
                Int acc = 0;
                for (int i = 0; i <= n; ++i) acc += p.coeffs[i] * scaled[i];
                s = acc.sign();
            } else {
                T pairing = extremal_pairing(p, v);
                T scale(0);
                for (int i = 0; i <= n; ++i)
                    scale += abs_val(static_cast<T>(p.coeffs[i].template convert_to<long double>())) * abs_val(v[i]);
                s = fuzzy_sign(pairing, tol, scale);
            }
            if (s < 0) {
                out.status = Feasibility::Infeasible;
                out.certificate = p;
                throw detail::stop_scan{};
            }
            if (s == 0 && !is_exact_v<T>) marginal = true;
        });
    } catch (detail::stop_scan) {
        return out;
    }
    if (marginal) {
        out.status = Feasibility::Marginal;
        return out;
    }
    out.status = Feasibility::Feasible;
    if (auto q = lp_feasible_witness(v, l, tol)) {
        out.witness = CountDistribution<T>(static_cast<int>(l), std::move(*q));
    } else if (is_exact_v<T>) {
        throw std::logic_error("duality violation: certificates pass but LP finds no witness");
    } else {
        out.status = Feasibility::Marginal;
    }
    return out;
}

// phi(x) = max_{0 <= i < l} [(2i+1) x - i(i+1)]
template <class T>
T phi_n2(const T& x, long l) {
    T best = x;  // i = 0
    for (long i = 1; i < l; ++i) {
        T cand = T(2 * i + 1) * x - T(i * (i + 1));
        if (cand > best) best = cand;
    }
    return best;
}

// phi_1(x, y) = max_{1 <= i < l} [(2i+1) y - i(i+1) x]
template <class T>
T phi1_n3(const T& x, const T& y, long l) {
    T best = T(3) * y - T(2) * x;
    for (long i = 2; i < l; ++i) {
        T cand = T(2 * i + 1) * y - T(i * (i + 1)) * x;
        if (cand > best) best = cand;
    }
    return best;
}

// phi_2(x, y) = min_{0 <= i < l-1} [i(i+1) l - (2il + i^2 + i + l) x + (l + 2i + 1) y]
template <class T>
T phi2_n3(const T& x, const T& y, long l) {
    T best = T(l + 1) * y - T(l) * x;  // i = 0
    for (long i = 1; i < l - 1; ++i) {
        T cand = T(i * (i + 1) * l) - T(2 * i * l + i * i + i + l) * x + T(l + 2 * i + 1) * y;
        if (cand < best) best = cand;
    }
    return best;
}

// Paper's explicit regions for n = 2 and n = 3.
template <class T>
bool closed_form_region(const std::vector<T>& v, long l) {
    const int n = static_cast<int>(v.size()) - 1;
    if (n == 2) return v[2] <= T(l) * v[1] && v[2] >= phi_n2(v[1], l);
    if (n == 3)
        return v[3] >= phi1_n3(v[1], v[2], l) && v[3] >= T(0) && v[3] <= phi2_n3(v[1], v[2], l);
    throw std::domain_error("closed_form_region: only n = 2, 3");
}

}  // namespace exchkit
