#include <gtest/gtest.h>

#include <random>

#include "weylsum/weyl.hpp"

using namespace weylsum;

namespace {

Complex naive_weyl(long double a1, long double ak, int k, u64 first, u64 last) {
    long double re = 0, im = 0;
    for (u64 n = first; n <= last; ++n) {
        long double nk = std::pow(static_cast<long double>(n), k);
        long double ph = a1 * n + ak * nk;
        ph -= std::floor(ph);
        re += std::cos(2.0L * M_PIl * ph);
        im += std::sin(2.0L * M_PIl * ph);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

}  // namespace

TEST(Weyl, ZeroPhasesCountTerms) {
    WeylArgs args{{{1, DD(0.0)}, {3, DD(0.0)}}, FullRange{100}};
    const Complex f = weyl_sum(args);
    EXPECT_NEAR(f.real(), 100.0, 1e-12);
    EXPECT_NEAR(f.imag(), 0.0, 1e-12);
}

TEST(Weyl, HalfTurnFourTerms) {
    WeylArgs args{{{1, DD(0.5)}, {3, DD(0.0)}}, FullRange{4}};
    EXPECT_LT(std::abs(weyl_sum(args)), 1e-14);
}

TEST(Weyl, RangesAndBounds) {
    EXPECT_EQ(index_bounds(FullRange{100.7}).count(), 100u);
    const auto d = index_bounds(DyadicRange{10.5});
    EXPECT_EQ(d.first, 11u);
    EXPECT_EQ(d.last, 21u);
    EXPECT_EQ(index_bounds(DyadicRange{10}).count(), 10u);
}

TEST(Weyl, MatchesLongDoubleOracle) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double a1 = U(rng), ak = U(rng) * 1e-3;
        const int k = 2 + i % 2;
        const double P = 50 + 2000 * U(rng);
        const Complex f = weyl_sum_binomial(DD(a1), DD(ak), k, FullRange{P});
        const Complex o = naive_weyl(a1, ak, k, 1, static_cast<u64>(P));
        EXPECT_LT(std::abs(f - o), 1e-7) << i;
    }
}

TEST(Weyl, BoundedByTermCount) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double Q = 1 + 500 * U(rng);
        const Complex f = weyl_sum_binomial(DD(U(rng)), DD(U(rng)), 3, DyadicRange{Q});
        EXPECT_LE(std::abs(f), static_cast<double>(index_bounds(DyadicRange{Q}).count()) + 1e-9);
    }
}

TEST(Weyl, NegationConjugates) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const DD a1(U(rng)), ak(U(rng));
        const Complex f = weyl_sum_binomial(a1, ak, 3, FullRange{777});
        const Complex g = weyl_sum_binomial(-a1, -ak, 3, FullRange{777});
        EXPECT_LT(std::abs(std::conj(f) - g), 1e-12 * 777);
    }
}

TEST(Weyl, PeriodicInEachCoefficient) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const DD a1(U(rng)), ak(U(rng));
        const Complex f = weyl_sum_binomial(a1, ak, 2, FullRange{1000});
        EXPECT_LT(std::abs(f - weyl_sum_binomial(a1 + DD(1.0), ak, 2, FullRange{1000})), 1e-9);
        EXPECT_LT(std::abs(f - weyl_sum_binomial(a1, ak - DD(3.0), 2, FullRange{1000})), 1e-9);
    }
}

TEST(Weyl, DyadicAssemblyPartitionsTheRange) {
    EXPECT_NEAR(dyadic_assemble(DD(0.0), DD(0.0), 3, 64).real(), 64.0, 1e-12);
    EXPECT_EQ(dyadic_block_count(64), 7);
    EXPECT_EQ(dyadic_block_count(1.5), 1);
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const DD a1(U(rng)), ak(U(rng));
        const double P = i == 0 ? 1.5 : 1 + 1000 * U(rng);
        const int k = 2 + i % 2;
        EXPECT_LT(std::abs(dyadic_assemble(a1, ak, k, P) - weyl_sum_binomial(a1, ak, k, FullRange{P})), 1e-9) << P;
    }
}

TEST(Weyl, GridEvaluationMatchesPointwise) {
    const DD gamma(std::sqrt(2.0) - 1.0);
    const auto terms = binomial_diagonal_terms(gamma, 3, DyadicRange{40});
    const UniformGrid grid{DD(0.01), dd_ratio(1.0, 3000.0), 3000};
    const auto vals = evaluate_on_grid(terms, grid);
    for (std::size_t j : {0u, 1u, 511u, 512u, 1999u, 2999u}) {
        const DD alpha = grid.at(j);
        const Complex direct = weyl_sum_binomial(alpha, alpha + gamma, 3, DyadicRange{40});
        EXPECT_LT(std::abs(vals[j] - direct), 1e-10) << j;
    }
}

TEST(Weyl, ParsevalIdentity) {
    const auto a = second_moment_parseval(3, DD(std::sqrt(2.0) - 1.0), 50, 2000000);
    EXPECT_EQ(a.exact, 50);
    EXPECT_LE(a.relative_error(), 1e-6);
    const auto b = second_moment_parseval(2, DD(0.0), 10);
    EXPECT_EQ(b.exact, 10);
    EXPECT_LE(b.relative_error(), 1e-6);
    const auto c = second_moment_parseval(3, dd_ratio(1.0, 3.0), 33.5);
    EXPECT_EQ(c.exact, 34);
    EXPECT_LE(c.relative_error(), 1e-6);
    EXPECT_THROW(second_moment_parseval(3, DD(0.1), 50, 100), ValidationError);
}

TEST(Weyl, ParsevalRandomGammas) {
    std::mt19937_64 rng(26);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double Q : {10.0, 33.5, 60.0})
        for (int k : {2, 3})
            EXPECT_LE(second_moment_parseval(k, DD(U(rng)), Q).relative_error(), 1e-6);
}

TEST(Weyl, MinorArcMomentSplit) {
    const auto r = minor_arc_second_moment(3, 200, 0.1, 0.3);
    EXPECT_EQ(r.total, 200);
    EXPECT_LT(r.ratio, 0.5);
    EXPECT_NEAR(r.major + r.minor, 200.0, 1e-9);
    EXPECT_FALSE(r.overlapping);
}

TEST(Weyl, RejectsBadRanges) {
    EXPECT_THROW(weyl_sum_binomial(DD(0.1), DD(0.2), 3, FullRange{-1}), ValidationError);
    EXPECT_THROW(weyl_sum_binomial(DD(0.1), DD(0.2), 1, FullRange{10}), ValidationError);
}
