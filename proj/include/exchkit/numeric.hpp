#pragma once

// Exact-rational and floating-point scalar support shared by every module.
//
// All decision procedures are templates over a scalar type T which is either
// exchkit::Rational (exact, no rounding) or double (comparisons go through an
// explicit tolerance). Exact mode never consults the tolerance.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace exchkit {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class T>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

// Comparison tolerance carried by every verdict-producing operation. Ignored
// when T is exact.
struct Tol {
    double tau = 1e-10;
};

inline Int binomial_int(long n, long k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    Int r = 1;
    for (long i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

inline Int factorial_int(long n) {
    Int r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

template <class T>
T pow_n(T base, unsigned long e) {
    T r = T(1);
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline int sign_of(const Rational& x) { return x.sign(); }
inline int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Sign with a dead band of tau*scale around zero (exact types ignore it).
template <class T>
int fuzzy_sign(const T& x, const Tol&, const T& /*scale*/ = T(1)) {
    return sign_of(x);
}
inline int fuzzy_sign(double x, const Tol& tol, double scale = 1.0) {
    double band = tol.tau * std::abs(scale);
    if (x > band) return 1;
    if (x < -band) return -1;
    return 0;
}

template <class T>
double to_double(const T& x) {
    return static_cast<double>(x);
}
inline double to_double(const Rational& x) { return x.template convert_to<double>(); }

template <class T>
T abs_val(const T& x) {
    return x < T(0) ? T(-x) : x;
}

// Parses "p/q", plain integers and decimal literals ("0.25" -> 1/4).
inline Rational parse_rational(const std::string& s) {
    auto bad = [&]() -> Rational { throw std::invalid_argument("not a rational: '" + s + "'"); };
    if (s.empty()) return bad();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash)), den(s.substr(slash + 1));
        if (den == 0) return bad();
        return Rational(num, den);
    }
    auto dot = s.find('.');
    auto exp = s.find_first_of("eE");
    long shift = 0;
    std::string digits = s;
    if (exp != std::string::npos) {
        shift = std::stol(s.substr(exp + 1));
        digits = s.substr(0, exp);
        dot = digits.find('.');
    }
    if (dot != std::string::npos) {
        std::string frac = digits.substr(dot + 1);
        shift -= static_cast<long>(frac.size());
        digits = digits.substr(0, dot) + frac;
    }
    if (digits.empty() || digits == "-" || digits == "+") return bad();
    Int num(digits);
    Rational r(num);
    if (shift > 0) r *= Rational(pow_n(Int(10), shift));
    if (shift < 0) r /= Rational(pow_n(Int(10), -shift));
    return r;
}

inline std::string rational_string(const Rational& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

// log(n choose k) in double, for prefactors too large to form directly.
inline double log_binomial(long n, long k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1);
}

}  // namespace exchkit
