#include <catch2/catch_amalgamated.hpp>

#include "exchkit/count_distribution.hpp"
#include "exchkit/linalg.hpp"
#include "exchkit/moment_feasibility.hpp"

#include <random>

using namespace exchkit;
using R = Rational;

namespace {

// Moment vector (1, EN, .., EN^n) of a random measure on {0..l}.
std::vector<R> random_grid_moments(std::mt19937_64& rng, int n, long l) {
    std::uniform_int_distribution<int> num(0, 12);
    std::vector<R> q(l + 1);
    R total(0);
    for (long j = 0; j <= l; ++j) {
        q[j] = R(num(rng));
        total += q[j];
    }
    if (total == 0) {
        q[0] = 1;
        total = 1;
    }
    std::vector<R> v(n + 1, R(0));
    for (int i = 0; i <= n; ++i)
        for (long j = 0; j <= l; ++j) v[i] += pow_n(R(j), i) * q[j] / total;
    return v;
}

std::vector<R> moments_of_point(long j, int n) {
    std::vector<R> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = pow_n(R(j), i);
    return v;
}

}  // namespace

TEST_CASE("extremal enumeration matches the stated small cases") {
    auto e23 = enumerate_extremal(2, 3);
    REQUIRE(e23.size() == 4);
    // (x-i)(x-i-1) for i = 0,1,2, then x(3-x)
    CHECK(e23[0].pair_roots == std::vector<long>{0});
    CHECK(e23[1].pair_roots == std::vector<long>{1});
    CHECK(e23[2].pair_roots == std::vector<long>{2});
    CHECK(e23[3].root_at_zero);
    CHECK(e23[3].root_at_l);
    // x(3-x) = 3x - x^2
    CHECK(e23[3].coeffs[0] == 0);
    CHECK(e23[3].coeffs[1] == 3);
    CHECK(e23[3].coeffs[2] == -1);

    auto e33 = enumerate_extremal(3, 3);
    REQUIRE(e33.size() == 4);  // x(x-1)(x-2), x(x-2)(x-3), (3-x)x(x-1), (3-x)(x-1)(x-2)
    CHECK(e33[0].root_at_zero);
    CHECK(e33[0].pair_roots == std::vector<long>{1});
    CHECK(e33[1].pair_roots == std::vector<long>{2});
    CHECK(e33[2].root_at_l);
    CHECK(e33[2].pair_roots == std::vector<long>{0});
    CHECK(e33[3].pair_roots == std::vector<long>{1});

    for (long l = 2; l <= 24; ++l) CHECK(enumerate_extremal(2, l).size() == static_cast<std::size_t>(l + 1));
}

TEST_CASE("every enumerated polynomial is nonnegative on the grid with simple roots") {
    for (auto [n, l] : std::vector<std::pair<int, long>>{{2, 5}, {3, 6}, {4, 7}, {5, 9}, {6, 9}}) {
        long count = 0;
        for_each_extremal(n, l, [&](const ExtremalPolynomial& p) {
            ++count;
            int zeros = 0;
            for (long x = 0; x <= l; ++x) {
                Int val = p.evaluate(x);
                CHECK(val >= 0);
                if (val == 0) ++zeros;
            }
            CHECK(zeros == n);  // n simple roots on the grid
            CHECK(p.coeffs[n] != 0);
        });
        CHECK(Int(count) == count_extremal(n, l));
    }
}

TEST_CASE("enumeration guards") {
    CHECK_THROWS_AS(enumerate_extremal(4, 3), std::domain_error);
    CHECK_THROWS_AS(enumerate_extremal(8, 2000, Int(1000)), EnumerationCapExceeded);
}

TEST_CASE("discrete moment feasibility on the stated examples") {
    // point mass at 2 on {0..3}
    auto pm = discrete_moment_feasible<R>({R(1), R(2), R(4)}, 3);
    CHECK(pm.status == Feasibility::Feasible);
    REQUIRE(pm.witness);
    CHECK(pm.witness->pi[2] == 1);

    // v = (1, 3/2, 9/4): certificate (x-1)(x-2) pairs to -1/4
    auto bad = discrete_moment_feasible<R>({R(1), R(3, 2), R(9, 4)}, 3);
    CHECK(bad.status == Feasibility::Infeasible);
    REQUIRE(bad.certificate);
    CHECK(bad.certificate->pair_roots == std::vector<long>{1});
    CHECK(extremal_pairing(*bad.certificate, std::vector<R>{R(1), R(3, 2), R(9, 4)}) == R(-1, 4));

    // Binomial(3, 1/2) power moments: EN = 3/2, EN^2 = 3
    auto bin = discrete_moment_feasible<R>({R(1), R(3, 2), R(3)}, 3);
    CHECK(bin.status == Feasibility::Feasible);
}

TEST_CASE("lp witness on the stated examples") {
    auto w = lp_feasible_witness<R>({R(1), R(2), R(4)}, 3);
    REQUIRE(w);
    CHECK((*w)[2] == 1);

    // Binomial(3,1/2) moments admit the binomial weights among the witnesses
    auto wb = lp_feasible_witness<R>({R(1), R(3, 2), R(3)}, 3);
    REQUIRE(wb);
    R sum(0), m1(0), m2(0);
    for (long j = 0; j <= 3; ++j) {
        CHECK((*wb)[j] >= 0);
        sum += (*wb)[j];
        m1 += R(j) * (*wb)[j];
        m2 += R(j * j) * (*wb)[j];
    }
    CHECK(sum == 1);
    CHECK(m1 == R(3, 2));
    CHECK(m2 == 3);

    CHECK_FALSE(lp_feasible_witness<R>({R(1), R(3, 2), R(9, 4)}, 3));
}

TEST_CASE("duality: certificates and the LP oracle agree on random rational inputs") {
    std::mt19937_64 rng(12021);
    std::uniform_int_distribution<int> pick_n(1, 4);
    std::uniform_int_distribution<long> pick_l(4, 30);
    std::uniform_int_distribution<int> mode(0, 2);
    int cases = 0, feasible_count = 0, infeasible_count = 0;
    while (cases < 600) {
        int n = pick_n(rng);
        long l = pick_l(rng);
        if (l < n) continue;
        std::vector<R> v;
        int m = mode(rng);
        if (m == 0) {
            v = random_grid_moments(rng, n, l);  // guaranteed feasible
        } else {
            v = random_grid_moments(rng, n, l);
            // random perturbation, may push the vector outside the cone
            std::uniform_int_distribution<int> jitter(-8, 8);
            int denom = m == 1 ? 100 : 10;
            for (int i = 1; i <= n; ++i) v[i] += R(jitter(rng), denom) * pow_n(R(l), i - 1);
        }
        auto dual = discrete_moment_feasible(v, l);
        auto primal = lp_feasible_witness(v, l);
        if (dual.status == Feasibility::Feasible) {
            ++feasible_count;
            REQUIRE(primal.has_value());
            REQUIRE(dual.witness);
            // witness reproduces the moments exactly
            for (int i = 0; i <= n; ++i) {
                R acc(0);
                for (long j = 0; j <= l; ++j) acc += pow_n(R(j), i) * dual.witness->pi[j];
                CHECK(acc == v[i]);
            }
            int support = 0;
            for (long j = 0; j <= l; ++j) support += dual.witness->pi[j] != 0;
            CHECK(support <= n + 1);
        } else {
            ++infeasible_count;
            CHECK_FALSE(primal.has_value());
            REQUIRE(dual.certificate);
            CHECK(extremal_pairing(*dual.certificate, v) < 0);
        }
        ++cases;
    }
    // both branches must actually be exercised
    CHECK(feasible_count > 50);
    CHECK(infeasible_count > 50);
}

TEST_CASE("closed form region n=2") {
    // phi(3/2) with l=3 is max(3/2, 5/2, 3/2) = 5/2
    CHECK(phi_n2(R(3, 2), 3) == R(5, 2));

    // boundary point (3/2, 5/2) is feasible, equality at the phi face
    CHECK(closed_form_region<R>({R(1), R(3, 2), R(5, 2)}, 3));
    auto verdict = discrete_moment_feasible<R>({R(1), R(3, 2), R(5, 2)}, 3);
    CHECK(verdict.status == Feasibility::Feasible);

    // v2 > l v1 face
    CHECK_FALSE(closed_form_region<R>({R(1), R(3, 2), R(23, 5)}, 3));

    CHECK_THROWS_AS(closed_form_region<R>({R(1), R(1, 2)}, 3), std::domain_error);
}

TEST_CASE("closed form regions agree with the certificate test") {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<long> pick_l(3, 14);
    std::uniform_int_distribution<int> jitter(-10, 10);
    for (int n = 2; n <= 3; ++n) {
        for (int round = 0; round < 400; ++round) {
            long l = pick_l(rng);
            if (l < n) continue;
            auto v = random_grid_moments(rng, n, l);
            if (round % 2) {
                for (int i = 1; i <= n; ++i) v[i] += R(jitter(rng), 50) * pow_n(R(l), i - 1);
            }
            bool region = closed_form_region(v, l);
            auto dual = discrete_moment_feasible(v, l);
            CHECK(region == (dual.status == Feasibility::Feasible));
        }
    }
}

TEST_CASE("scaling consistency and witness round trip") {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 100; ++round) {
        int n = 1 + round % 4;
        long l = 5 + round % 20;
        auto v = random_grid_moments(rng, n, l);
        auto verdict = discrete_moment_feasible(v, l);
        REQUIRE(verdict.status == Feasibility::Feasible);
        auto m = moments_from_count(*verdict.witness, n);
        for (int i = 0; i <= n; ++i) CHECK(m.power[i] == v[i]);
    }
}

TEST_CASE("feasible grids for growing l imply a non-indefinite IE hankel pair") {
    std::mt19937_64 rng(555);
    int checked = 0;
    for (int round = 0; round < 40; ++round) {
        int n = 2 + round % 3;
        // random moments of a measure on [0,1] grid; rescale to v on [0,1]
        auto vgrid = random_grid_moments(rng, n, 20);
        std::vector<R> v01(n + 1);
        for (int i = 0; i <= n; ++i) v01[i] = vgrid[i] / pow_n(R(20), i);
        bool all_feasible = true;
        for (long l : {25L, 50L, 100L, 200L}) {
            std::vector<R> scaled(n + 1);
            for (int i = 0; i <= n; ++i) scaled[i] = v01[i] * pow_n(R(l), i);
            auto verdict = discrete_moment_feasible(scaled, l);
            if (verdict.status != Feasibility::Feasible) all_feasible = false;
        }
        if (all_feasible) {
            auto hp = hankel_pair(v01, HankelIE{});
            CHECK(hp.v_verdict != Definiteness::Indefinite);
            CHECK(hp.w_verdict != Definiteness::Indefinite);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("double mode reports Marginal inside the tau band") {
    Tol tol{1e-9};
    // v2 = phi(v1): the (x-1)(x-2) pairing is exactly zero
    auto boundary = discrete_moment_feasible<double>({1.0, 1.5, 2.5}, 3, tol);
    CHECK(boundary.status == Feasibility::Marginal);
    auto infeasible = discrete_moment_feasible<double>({1.0, 1.5, 2.25}, 3, tol);
    CHECK(infeasible.status == Feasibility::Infeasible);
    auto clear = discrete_moment_feasible<double>({1.0, 1.5, 2.6}, 3, tol);
    CHECK(clear.status == Feasibility::Feasible);
}
