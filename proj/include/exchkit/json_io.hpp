#pragma once

// JSON forms of the shared value types. Rationals serialize as "p/q" strings
// so exact payloads survive a round trip.

#include "exchkit/count_distribution.hpp"
#include "exchkit/moment_feasibility.hpp"

#include <json.hpp>

#include <string>

namespace exchkit {

inline nlohmann::json scalar_to_json(const Rational& x) { return rational_string(x); }
inline nlohmann::json scalar_to_json(double x) { return x; }

template <class T>
T scalar_from_json(const nlohmann::json& j);
template <>
inline Rational scalar_from_json<Rational>(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw std::invalid_argument("expected rational string");
}
template <>
inline double scalar_from_json<double>(const nlohmann::json& j) {
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
    return j.get<double>();
}

template <class T>
nlohmann::json to_json(const CountDistribution<T>& mu) {
    nlohmann::json j;
    j["n"] = mu.n;
    auto arr = nlohmann::json::array();
    for (const T& p : mu.pi) arr.push_back(scalar_to_json(p));
    j["pi"] = arr;
    return j;
}

template <class T>
CountDistribution<T> count_distribution_from_json(const nlohmann::json& j) {
    CountDistribution<T> mu;
    mu.n = j.at("n").get<int>();
    for (const auto& e : j.at("pi")) mu.pi.push_back(scalar_from_json<T>(e));
    if (static_cast<int>(mu.pi.size()) != mu.n + 1) throw std::invalid_argument("pi must have n+1 entries");
    return mu;
}

inline nlohmann::json to_json(const ExtremalPolynomial& p) {
    nlohmann::json j;
    j["n"] = p.n;
    j["l"] = p.l;
    j["pair_roots"] = p.pair_roots;
    j["root_at_zero"] = p.root_at_zero;
    j["root_at_l"] = p.root_at_l;
    auto arr = nlohmann::json::array();
    for (const Int& c : p.coeffs) arr.push_back(c.str());
    j["coeffs"] = arr;
    return j;
}

}  // namespace exchkit
