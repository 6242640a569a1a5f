#include <gtest/gtest.h>

#include <random>

#include "weylsum/extremal.hpp"
#include "weylsum/oscillatory.hpp"

using namespace weylsum;

namespace {

double brute_best(u64 q, i64 c) {
    double best = 0.0;
    for (u64 a = 1; a <= q; ++a)
        if (nt::gcd(static_cast<i64>(a), static_cast<i64>(q)) == 1)
            best = std::max(best, std::abs(complete_sum_direct({q, static_cast<i64>(a) - c, static_cast<i64>(a), 3})));
    return best;
}

}  // namespace

TEST(CubicMoment, ThreeWaysAgree) {
    for (u64 p = 2; p <= 41; ++p) {
        if (!nt::is_prime(p)) continue;
        for (u64 c = 0; c < p; ++c) {
            const double d = cubic_moment_direct(p, static_cast<i64>(c));
            EXPECT_NEAR(cubic_moment_congruence(p, static_cast<i64>(c)), d, 1e-6 * std::max(1.0, d)) << p << " " << c;
            if (p > 3) EXPECT_NEAR(cubic_moment_legendre(p, static_cast<i64>(c)), d, 1e-6 * std::max(1.0, d)) << p << " " << c;
        }
    }
}

TEST(CubicMoment, ModulusThree) {
    for (i64 c : {1, 2}) EXPECT_NEAR(cubic_moment_direct(3, c), 9.0, 1e-12);
}

TEST(CubicMoment, SevenCharacterSum) {
    const int signs[6] = {-1, 1, -1, -1, 1, -1};
    for (i64 c = 1; c <= 6; ++c) {
        Complex expect{0.0, 0.0};
        for (int h = 1; h <= 6; ++h) expect += static_cast<double>(signs[h - 1]) * std::polar(1.0, 2 * M_PI * c * h / 7.0);
        const Complex got = cubic_character_sum(7, c);
        EXPECT_LT(std::abs(got - expect), 1e-12) << c;
        EXPECT_LT(std::abs(got), 6.0);
    }
}

TEST(FindA3, TrivialModulus) {
    const auto r = find_a3(1, 0);
    EXPECT_EQ(r.a, 1);
    EXPECT_NEAR(r.s_abs, 1.0, 1e-15);
}

TEST(FindA3, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(61);
    for (u64 q = 3; q <= 301; q += 2) {
        i64 c;
        do c = static_cast<i64>(rng() % q);
        while (nt::gcd(c, static_cast<i64>(q)) != 1);
        const auto r = find_a3(q, c);
        EXPECT_TRUE(r.exhaustive);
        EXPECT_NEAR(r.s_abs, brute_best(q, c), 1e-9) << q << " " << c;
        EXPECT_NEAR(std::abs(complete_sum_direct({q, r.a - c, r.a, 3})), r.s_abs, 1e-9);
        EXPECT_GE(r.s_abs, 0.3 * std::pow(static_cast<double>(q), 0.45));
    }
    EXPECT_GE(find_a3(3, 1).s_abs, 3.0 / std::sqrt(2.0));
}

TEST(FindA3, PrimeSquareDiagonalChoice) {
    for (u64 p : {5ULL, 7ULL, 11ULL, 13ULL}) {
        for (i64 c : {1LL, 2LL, 3LL}) EXPECT_NEAR(std::abs(complete_sum_direct({p * p, 0, c, 3})), static_cast<double>(p), 1e-9);
    }
}

TEST(FindA3, RandomisedBeyondExhaustiveLimit) {
    const auto r = find_a3(10007ULL * 3, 5, 9);
    EXPECT_FALSE(r.exhaustive);
    EXPECT_TRUE(r.threshold_met);
    EXPECT_NEAR(std::abs(complete_sum(10007ULL * 3, r.a - 5, r.a, 3)), r.s_abs, 1e-6 * r.s_abs);
}

TEST(Witness, ConstructionIsExact) {
    for (int k : {2, 3}) {
        const auto g = parse_real("sqrt2");
        const auto w = lower_bound_witness(g, k, 0.05, 100);
        EXPECT_EQ(w.q % 2, 1);
        EXPECT_GE(w.q, 100);
        // beta_k = alpha + gamma - a_k/q vanishes in exact arithmetic.
        const HighReal top = HighReal(w.a_k) / w.q;
        const HighReal alpha = top - g.value;
        EXPECT_LT(boost::multiprecision::abs(HighReal(w.alpha.hi) + HighReal(w.alpha.lo) - alpha), HighReal("1e-30"));
        // |beta1| <= q^{-2}, checked on the convergent itself.
        const HighReal beta1 = HighReal(w.c) / w.q - g.value;
        EXPECT_LE(boost::multiprecision::abs(beta1), HighReal(1) / (HighReal(w.q) * w.q));
        EXPECT_EQ(w.a_1, w.a_k - w.c);
    }
}

TEST(Witness, RatioInRecordedBand) {
    const auto w = lower_bound_witness(parse_real("sqrt2"), 2, 0.05, 100);
    EXPECT_GE(w.ratio, 0.05);
    EXPECT_LE(w.ratio, 20.0);
    EXPECT_TRUE(w.passed);
}

TEST(Witness, LinearIntegralStaysLarge) {
    // |I| = Q |sinc(pi beta1 Q)|; the 0.9 Q floor needs Q^{-2 delta} <= 1/4 or so.
    const double delta = 0.1;
    for (double Q : {2e3, 1e4, 1e5}) {
        const double beta1 = std::pow(Q, -2 * delta) / Q;
        const double s = M_PI * beta1 * Q;
        const double got = std::abs(integral_linear(beta1, Q, 2 * Q));
        EXPECT_NEAR(got, Q * std::sin(s) / s, 1e-9 * Q);
        EXPECT_GE(got, 0.9 * Q);
    }
}

TEST(Witness, AtScaleUsesBestConvergent) {
    const auto g = parse_real("golden");
    const auto w = witness_at_scale(g, 2, 0.02, 4096);
    EXPECT_EQ(w.q % 2, 1);
    EXPECT_LE(static_cast<double>(w.q), 2 * std::pow(4096, 0.52) + 200);
    const auto floor100 = witness_at_scale(g, 2, 0.02, 4096, 0, 0.05, 100);
    EXPECT_GE(floor100.q, 100);
    EXPECT_GE(w.f_abs, floor100.f_abs);
}

TEST(SupSearch, ZeroGammaPeaksAtOrigin) {
    for (int k : {2, 3}) {
        const auto r = sup_search(parse_real("0"), k, 20);
        EXPECT_NEAR(r.value, 20.0, 1e-9);
        EXPECT_LT(std::min(r.alpha_star, 0.5 - r.alpha_star), 1e-6);
    }
}

TEST(SupSearch, InjectedSeedIsNotLost) {
    const auto g = parse_real("sqrt2");
    const double Q = 64;
    const auto w = witness_at_scale(g, 2, 0.02, Q);
    SupSearchOptions opt;
    opt.seeds.push_back(w.alpha);
    const auto r = sup_search(g, 2, Q, opt);
    EXPECT_GE(r.value, w.f_abs - 1e-9);
}

TEST(SupSearch, TrivialBoundsAtModerateScale) {
    std::mt19937_64 rng(62);
    const double Q = 256;
    for (int t = 0; t < 2; ++t) {
        const auto g = precise_from_double(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        const auto r = sup_search(g, 2, Q);
        EXPECT_LE(r.value, Q + 1e-9);
        EXPECT_GE(r.value, std::sqrt(Q));
    }
}

TEST(SupSearch, CoarseGridNeedsOptIn) {
    SupSearchOptions opt;
    opt.coarse = 100;
    EXPECT_THROW(sup_search(parse_real("sqrt2"), 2, 64, opt), ValidationError);
    opt.allow_coarse = true;
    const auto r = sup_search(parse_real("sqrt2"), 2, 64, opt);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Theta, WitnessSlopeSqrtTwo) {
    std::vector<double> Qs;
    for (int e = 8; e <= 16; ++e) Qs.push_back(std::ldexp(1.0, e));
    for (int k : {2, 3}) {
        const auto r = theta_regression(parse_real("sqrt2"), k, Qs, ThetaMode::Witness);
        EXPECT_GE(r.slope, 0.70) << k;
        EXPECT_EQ(r.points.size(), Qs.size());
    }
}

TEST(Theta, GridSlopeRandomGamma) {
    std::mt19937_64 rng(63);
    std::vector<double> Qs;
    for (int e = 4; e <= 10; ++e) Qs.push_back(std::ldexp(1.0, e));
    const auto g = precise_from_double(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const auto r = theta_regression(g, 2, Qs, ThetaMode::Grid);
    EXPECT_LE(r.slope, 0.85);
}

TEST(Theta, NeedsFiveIncreasingScales) {
    EXPECT_THROW(theta_regression(parse_real("sqrt2"), 2, {256, 512, 1024}, ThetaMode::Witness), ValidationError);
    EXPECT_THROW(theta_regression(parse_real("sqrt2"), 2, {256, 512, 400, 1024, 2048}, ThetaMode::Witness), ValidationError);
}
