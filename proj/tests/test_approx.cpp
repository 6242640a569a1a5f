#include <gtest/gtest.h>

#include <random>
#include <set>

#include "weylsum/approx.hpp"

using namespace weylsum;

TEST(Approx, NearestIntegers) {
    EXPECT_EQ(nearest_integers(7, 2), (std::vector<i64>{3, 4}));
    EXPECT_EQ(nearest_integers(6, 3), (std::vector<i64>{2}));
    EXPECT_EQ(nearest_integers(5, 3), (std::vector<i64>{2}));
    EXPECT_EQ(nearest_integers(-7, 2), (std::vector<i64>{-4, -3}));
    EXPECT_EQ(nearest_integers(-5, 3), (std::vector<i64>{-2}));
}

TEST(Approx, DaggerTermsForUnitNumerator) {
    for (u64 q : {3ULL, 9ULL, 15ULL, 105ULL}) {
        std::set<u64> ds;
        for (const auto& t : dagger_terms(q, 1)) ds.insert(t.d);
        EXPECT_EQ(ds, (std::set<u64>{1, q})) << q;
    }
    const auto one = dagger_terms(1, 5);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].d, 1u);
    EXPECT_EQ(one[0].e, 5);
    for (u64 q : {4ULL, 12ULL, 30ULL}) {
        const auto terms = dagger_terms(q, static_cast<i64>(2 * q));
        ASSERT_EQ(terms.size(), 1u) << q;
        EXPECT_TRUE(terms[0].leading);
    }
}

TEST(Approx, DaggerCentresAreDistinct) {
    for (u64 q = 1; q <= 120; ++q) {
        for (i64 a1 = 0; a1 < static_cast<i64>(q); ++a1) {
            std::set<std::pair<i64, u64>> centres;
            int leading = 0;
            for (const auto& t : dagger_terms(q, a1)) {
                EXPECT_EQ(nt::gcd(t.e, static_cast<i64>(t.center_den)), 1u);
                centres.insert({t.e, t.center_den});
                leading += t.leading;
            }
            EXPECT_EQ(centres.size(), dagger_terms(q, a1).size());
            EXPECT_EQ(leading, 1);
        }
    }
}

TEST(Approx, DecompositionIsExact) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        MultiApprox ma;
        ma.k = 2 + i % 2;
        ma.q = 1 + rng() % 60;
        do ma.ak = static_cast<i64>(rng() % ma.q);
        while (nt::gcd(static_cast<i64>(ma.q), ma.ak) != 1);
        ma.a1 = static_cast<i64>(rng() % ma.q);
        ma.beta1 = U(rng) * 0.5 / static_cast<double>(ma.q);
        ma.betak = U(rng) * 1e-7;
        const FullRange range{300 + 200.0 * (i % 5)};
        const auto r = delta_residual(ma, range);
        EXPECT_LT(std::abs(main_term(ma, range) + r.direct - weyl_sum_of(ma, range)), 1e-9);
        EXPECT_LT(r.discrepancy, 1e-9);
    }
}

TEST(Approx, LeadingTermIsClassicalMainTerm) {
    const MultiApprox ma{12, 5, 7, 1e-4, 0.0, 3};
    const FullRange range{500};
    const Complex lead = complete_sum(12, 5, 7, 3) * integral_linear(1e-4, 0.0, 500.0) / 12.0;
    // Classical delta is f minus the leading term alone.
    EXPECT_LT(std::abs(weyl_sum_of(ma, range) - delta_classical(ma, range) - lead), 1e-9);
    // a1 divisible by q: no secondary terms.
    const MultiApprox mb{9, 0, 2, 3e-4, 1e-9, 3};
    EXPECT_LT(std::abs(secondary_terms(mb, range)), 1e-15);
    EXPECT_LT(std::abs(delta_residual(mb, range).direct - delta_classical(mb, range)), 1e-9);
}

TEST(Approx, UnitModulusMainTermIsTheIntegral) {
    const MultiApprox ma{1, 0, 0, 0.003, 2e-9, 3};
    const FullRange range{400};
    const Complex expect = integral_quad({0.003, 2e-9, 3, {{0.0, 400.0}}});
    EXPECT_LT(std::abs(main_term(ma, range) - expect), 1e-9);
}

TEST(Approx, RationalPointClassicalDelta) {
    // alpha = a/q exactly: f = (P/q) S + partial block, checked by direct summation.
    for (u64 q : {5ULL, 12ULL, 49ULL}) {
        const MultiApprox ma{q, 3, 1, 0.0, 0.0, 3};
        const double P = 1000;
        long double re = 0, im = 0;
        for (u64 n = 1; n <= 1000; ++n) {
            const u64 r = (3 * n + (n * n % q) * n) % q;
            re += std::cos(2 * M_PIl * r / q);
            im += std::sin(2 * M_PIl * r / q);
        }
        const Complex f{static_cast<double>(re), static_cast<double>(im)};
        const Complex expect = f - complete_sum(q, 3, 1, 3) * P / static_cast<double>(q);
        EXPECT_LT(std::abs(delta_classical(ma, P) - expect), 1e-9) << q;
    }
}

TEST(Approx, UnitModulusDeltaShape) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double P = 2000;
        const MultiApprox ma{1, 0, 0, 0.5 * U(rng), U(rng) * 1e-9, 3};
        const double d = std::abs(delta_classical(ma, P));
        EXPECT_LE(d, 10.0 * (1.0 + std::pow(P, 3) * std::fabs(ma.betak))) << i;
    }
}

TEST(Approx, ScanRatiosBounded) {
    for (int k : {2, 3}) {
        for (bool small : {true, false}) {
            DeltaScanConfig cfg;
            cfg.k = k;
            cfg.samples = 60;
            cfg.Pmax = 2000;
            cfg.small_betak = small;
            cfg.seed = 77;
            for (const auto& row : delta_scan(cfg)) {
                EXPECT_LE(row.ratio, default_calibration().main_term_C);
                if (small) EXPECT_TRUE(row.small_betak);
            }
        }
    }
}

TEST(Approx, ScanIsSeedDeterministic) {
    DeltaScanConfig cfg;
    cfg.samples = 25;
    cfg.Pmax = 1500;
    cfg.seed = 5;
    const auto a = delta_scan(cfg), b = delta_scan(cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].ma.q, b[i].ma.q);
        EXPECT_EQ(a[i].delta_abs, b[i].delta_abs);
    }
    cfg.seed = 6;
    EXPECT_NE(delta_scan(cfg)[0].delta_abs, a[0].delta_abs);
}

TEST(Approx, CubicSupBound) {
    for (u64 q : {1ULL, 7ULL, 30ULL}) {
        const MultiApprox ma{q, 1, 1, 1e-5, 1e-10, 3};
        const auto r = cubic_sup_bound(ma, 3000);
        EXPECT_LE(r.value, r.bound) << q;
    }
    EXPECT_THROW(cubic_sup_bound({2501, 1, 1, 0.0, 0.0, 3}, 100), ValidationError);
}

TEST(Approx, ValidatesApproximation) {
    EXPECT_THROW(main_term({6, 1, 2, 0.0, 0.0, 3}, FullRange{100}), ValidationError);
    EXPECT_THROW(main_term({6, 1, 5, 0.1, 0.0, 3}, FullRange{100}), ValidationError);
}
