#include <catch2/catch_amalgamated.hpp>

#include "exchkit/extendibility.hpp"

#include <random>

using namespace exchkit;
using R = Rational;

namespace {

CountDistribution<R> cw_counts(int n, const R& a, const R& b) { return cw_measure(CWParams<R>{n, a, b}).counts; }

}  // namespace

TEST_CASE("ie_check on Curie-Weiss families") {
    CHECK(ie_check(cw_counts(5, R(2), R(7, 10))) == IEVerdict::IE);
    CHECK(ie_check(cw_counts(2, R(1), R(101, 100))) == IEVerdict::NotIE);

    // product measure: the Hankel pair is singular and the verdict comes from
    // the rescaled-grid confirmation with a point-mass witness
    CHECK(ie_check(cw_counts(4, R(1), R(1))) == IEVerdict::IE);
    CHECK(ie_check(cw_counts(3, R(3), R(1))) == IEVerdict::IE);

    std::mt19937_64 rng(914);
    std::uniform_int_distribution<int> num(1, 12);
    for (int round = 0; round < 30; ++round) {
        int n = 2 + round % 6;
        R a(num(rng), num(rng));
        R b(num(rng), num(rng) + 12);  // b < 1
        CHECK(ie_check(cw_counts(n, a, b)) == IEVerdict::IE);
        R bbad = R(1) + R(num(rng), 50);  // b > 1
        CHECK(ie_check(cw_counts(n, a, bbad)) == IEVerdict::NotIE);
    }
}

TEST_CASE("l_extendible on the boundary examples") {
    auto at_boundary = l_extendible(cw_counts(2, R(1), R(2)), 3);
    CHECK(at_boundary.status == ExtendStatus::Extendible);
    REQUIRE(at_boundary.witness);

    auto beyond = l_extendible(cw_counts(2, R(1), R(41, 20)), 3);
    CHECK(beyond.status == ExtendStatus::NotExtendible);
    CHECK(beyond.certificate);

    // n odd, l = n+1, h = 0 extends for arbitrarily large b
    auto odd = l_extendible(cw_counts(3, R(1), R(10)), 4);
    CHECK(odd.status == ExtendStatus::Extendible);

    CHECK_THROWS_AS(l_extendible(cw_counts(3, R(1), R(2)), 3), std::domain_error);
}

TEST_CASE("extension targets match the direct moment identities") {
    // for an extendible case, the witness's moments are exactly the targets
    auto mu = cw_counts(2, R(2, 3), R(3, 2));
    auto verdict = l_extendible(mu, 5);
    REQUIRE(verdict.status == ExtendStatus::Extendible);
    auto m = moments_from_count(*verdict.witness, 2);
    for (int k = 0; k <= 2; ++k) {
        CHECK(m.power[k] == verdict.power_targets[k]);
        CHECK(m.factorial[k] == verdict.factorial_targets[k]);
    }
    // and the witness projects back to mu exactly
    auto back = hypergeometric_project(*verdict.witness, 2);
    for (int k = 0; k <= 2; ++k) CHECK(back.pi[k] == mu.pi[k]);
}

TEST_CASE("witness projection and monotone nesting") {
    std::mt19937_64 rng(515);
    std::uniform_int_distribution<int> num(1, 10);
    int extendible_seen = 0;
    for (int round = 0; round < 60; ++round) {
        int n = 2 + round % 3;
        long l = n + 2 + round % 6;
        R a(num(rng), num(rng));
        R b = R(1) + R(num(rng), 12);
        auto mu = cw_counts(n, a, b);
        auto verdict = l_extendible(mu, l);
        if (verdict.status != ExtendStatus::Extendible) continue;
        ++extendible_seen;
        auto back = hypergeometric_project(*verdict.witness, n);
        for (int k = 0; k <= n; ++k) CHECK(back.pi[k] == mu.pi[k]);
        for (long lp = n + 1; lp < l; ++lp) {
            auto nested = l_extendible(mu, lp);
            CHECK(nested.status == ExtendStatus::Extendible);
            // the projected witness is itself a witness for l'
            auto proj = hypergeometric_project(*verdict.witness, static_cast<int>(lp));
            auto projected_back = hypergeometric_project(proj, n);
            for (int k = 0; k <= n; ++k) CHECK(projected_back.pi[k] == mu.pi[k]);
        }
    }
    CHECK(extendible_seen > 10);
}

TEST_CASE("n=2 exact condition (4.3) agrees with l_extendible") {
    std::mt19937_64 rng(8822);
    std::uniform_int_distribution<int> num(1, 20);
    for (long l : {4L, 9L, 17L, 26L, 40L}) {
        for (int round = 0; round < 12; ++round) {
            int p = num(rng), q = num(rng);
            R a = p <= q ? R(p, q) : R(q, p);  // a <= 1
            R b = R(1) + R(num(rng), num(rng) * 4);
            bool exact43 = n2_exact_condition(a, b, l);
            auto direct = l_extendible(cw_counts(2, a, b), l);
            CHECK(exact43 == (direct.status == ExtendStatus::Extendible));
        }
    }
}

TEST_CASE("small case oracle closed forms") {
    CHECK(small_case_oracle(2, 5, R(1, 2), R(5, 3)));  // bound 2a + 1/(3a) = 5/3
    CHECK_FALSE(small_case_oracle(2, 5, R(1, 2), R(168, 100)));
    CHECK(small_case_oracle(3, 5, R(1, 2), R(2)));  // both branches meet at 2
    CHECK_FALSE(small_case_oracle(3, 5, R(1, 2), R(201, 100)));
    CHECK(small_case_oracle(2, 4, R(1), R(2)));  // (3/2) a + (1/2)/a at a=1
    CHECK_FALSE(small_case_oracle(2, 4, R(1), R(201, 100)));
    CHECK(small_case_oracle(3, 4, R(1), R(1000)));             // a = 1: any b
    CHECK_FALSE(small_case_oracle(3, 4, R(1, 2), R(21, 10)));  // bound 1/sqrt(a(1-a)) = 2
    CHECK(small_case_oracle(3, 4, R(1, 2), R(2)));
    // symmetry a <-> 1/a
    CHECK(small_case_oracle(2, 3, R(3), R(10, 3)) == small_case_oracle(2, 3, R(1, 3), R(10, 3)));
    CHECK_THROWS_AS(small_case_oracle(5, 6, R(1), R(1)), std::domain_error);
}

TEST_CASE("small case oracle agrees with l_extendible on a grid") {
    // a modest grid here; the acceptance suite runs the dense one
    for (auto [n, l] : std::vector<std::pair<int, long>>{{2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}}) {
        for (int ai = 1; ai <= 8; ++ai) {
            for (int bi = 1; bi <= 10; ++bi) {
                R a(ai, 8);
                R b(2 * bi, 7);
                bool oracle = small_case_oracle(n, l, a, b);
                auto direct = l_extendible(cw_counts(n, a, b), l);
                INFO("n=" << n << " l=" << l << " a=" << ai << "/8 b=" << 2 * bi << "/7");
                CHECK(oracle == (direct.status == ExtendStatus::Extendible));
            }
        }
    }
}

TEST_CASE("asymptotic thresholds") {
    CHECK(c_crit(0.5) == Catch::Approx(2.0));
    CHECK(c_crit(0.3) == Catch::Approx(1.0 / 0.42));
    CHECK_THROWS_AS(c_crit(0.0), std::domain_error);

    CHECK(n2_sufficient_bound(1.0, 11) == Catch::Approx(1.2));

    CHECK(critical_window_dc(1, 2, 0) == Catch::Approx(2.0));
    CHECK(critical_window_dc(1, 2, 1) == Catch::Approx(4.0));
    CHECK_THROWS_AS(critical_window_dc(2, 4, 0), std::domain_error);
}

TEST_CASE("Thm 1.15(b) mechanism: v2 - v1^2 turns negative") {
    // b = 1 + c/l with 2 rho (1-rho) c > 1 (a = 1, c = 11/5)
    for (long l : {50L, 100L, 200L, 400L}) {
        R b = R(1) + R(11, 5 * l);
        auto targets = extension_moment_targets(cw_counts(2, R(1), b), l);
        R variance_proxy = targets.power[2] - targets.power[1] * targets.power[1];
        CHECK(variance_proxy < 0);
    }
    // and stays positive below the threshold (c = 9/5)
    for (long l : {50L, 200L}) {
        R b = R(1) + R(9, 5 * l);
        auto targets = extension_moment_targets(cw_counts(2, R(1), b), l);
        CHECK(targets.power[2] - targets.power[1] * targets.power[1] > 0);
    }
}

TEST_CASE("perturbed product measures stay extendible (Prop 1.20)") {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> jitter(-10, 10);
    for (int round = 0; round < 30; ++round) {
        int n = 2 + round % 3;
        long l = 2 * n;
        auto base = cw_counts(n, R(1), R(1));  // Binomial(n, 1/2)
        // entrywise perturbation of at most 1/1000, renormalized
        std::vector<R> pi = base.pi;
        R sum(0);
        for (auto& p : pi) {
            p += R(jitter(rng), 10000);
            sum += p;
        }
        for (auto& p : pi) p /= sum;
        CountDistribution<R> mu{n, pi};
        REQUIRE(mu.valid());
        auto verdict = l_extendible(mu, l);
        CHECK(verdict.status == ExtendStatus::Extendible);
    }
}

TEST_CASE("schwarz diagnostic at the critical window") {
    // n >= 4 and rho != 1/2: the implied centered moments violate Schwarz for
    // large l (here at l = 400, d = 0)
    auto diag = schwarz_critical_diagnostic(4, R(2), R(0), 400);
    CHECK(diag.violated);
    CHECK(diag.lhs > 0);

    // rho = 1/2 keeps the third moment small; no violation from this route
    auto sym = schwarz_critical_diagnostic(4, R(1), R(0), 400);
    CHECK_FALSE(sym.violated);
}
