#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "weylsum/number_theory.hpp"

using namespace weylsum;

namespace {

std::vector<bool> sieve(u64 n) {
    std::vector<bool> prime(n + 1, true);
    prime[0] = false;
    if (n >= 1) prime[1] = false;
    for (u64 i = 2; i * i <= n; ++i)
        if (prime[i])
            for (u64 j = i * i; j <= n; j += i) prime[j] = false;
    return prime;
}

}  // namespace

TEST(NumberTheory, PrimalityMatchesSieve) {
    const auto prime = sieve(20000);
    for (u64 n = 0; n <= 20000; ++n) EXPECT_EQ(nt::is_prime(n), prime[n]) << n;
    EXPECT_TRUE(nt::is_prime(1000000007ULL));
    EXPECT_FALSE(nt::is_prime(1000000007ULL * 998244353ULL));
}

TEST(NumberTheory, FactorizationReconstructs) {
    for (u64 n = 1; n <= 5000; ++n) {
        u64 prod = 1;
        for (const auto& pp : nt::factorize(n)) {
            EXPECT_TRUE(nt::is_prime(pp.p));
            EXPECT_EQ(pp.value, *nt::checked_pow(pp.p, pp.t));
            prod *= pp.value;
        }
        EXPECT_EQ(prod, n);
    }
}

TEST(NumberTheory, TotientAndMoebiusByCounting) {
    for (u64 n = 1; n <= 600; ++n) {
        u64 count = 0;
        for (u64 a = 1; a <= n; ++a) count += std::gcd(a, n) == 1;
        EXPECT_EQ(nt::euler_phi(n), count);
        // sum_{d | n} mu(d) = [n = 1]
        int s = 0;
        for (u64 d : nt::divisors(n)) s += nt::moebius(d);
        EXPECT_EQ(s, n == 1 ? 1 : 0);
    }
}

TEST(NumberTheory, ModularInverseAndPower) {
    for (u64 m : {7ULL, 97ULL, 1000ULL, 65537ULL}) {
        for (u64 a = 1; a < std::min<u64>(m, 300); ++a) {
            if (std::gcd(a, m) != 1) continue;
            EXPECT_EQ(nt::mulmod(a, nt::modinv(a, m), m), 1u);
        }
    }
    EXPECT_EQ(nt::powmod(3, 200, 1000003), [] {
        u64 r = 1;
        for (int i = 0; i < 200; ++i) r = r * 3 % 1000003;
        return r;
    }());
    EXPECT_EQ(nt::mod(-7, 5), 3u);
}

TEST(NumberTheory, LegendreMatchesEulerCriterion) {
    for (u64 p : {3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 101ULL}) {
        for (i64 a = -20; a <= 20; ++a) {
            const u64 r = nt::mod(a, p);
            int expected = r == 0 ? 0 : (nt::powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1);
            EXPECT_EQ(nt::legendre(a, p), expected) << a << " mod " << p;
        }
    }
}

TEST(NumberTheory, SquareRootsModPrime) {
    for (u64 p : {2ULL, 3ULL, 13ULL, 17ULL, 97ULL, 1009ULL}) {
        for (u64 a = 0; a < std::min<u64>(p, 200); ++a) {
            auto roots = nt::sqrt_mod_prime(static_cast<i64>(a), p);
            u64 brute = 0;
            for (u64 x = 0; x < p; ++x) brute += nt::mulmod(x, x, p) == a;
            EXPECT_EQ(roots.size(), brute);
            for (u64 r : roots) EXPECT_EQ(nt::mulmod(r, r, p), a);
        }
    }
}

TEST(NumberTheory, RamanujanSumMatchesCosineSum) {
    for (u64 q = 1; q <= 60; ++q) {
        for (i64 h = -5; h <= 70; ++h) {
            double s = 0.0;
            for (u64 a = 1; a <= q; ++a)
                if (std::gcd(a, q) == 1) s += std::cos(2.0 * M_PI * static_cast<double>(a) * h / static_cast<double>(q));
            EXPECT_NEAR(static_cast<double>(nt::ramanujan_sum(q, h)), s, 1e-9) << q << " " << h;
        }
    }
}

TEST(NumberTheory, CheckedPowDetectsOverflow) {
    EXPECT_EQ(*nt::checked_pow(10, 18), 1000000000000000000ULL);
    EXPECT_FALSE(nt::checked_pow(10, 20).has_value());
    EXPECT_EQ(*nt::checked_pow(0, 3), 0u);
}

TEST(NumberTheory, CrtPiecesRecombine) {
    for (u64 q : {2ULL, 12ULL, 360ULL, 1001ULL, 4096ULL, 99991ULL}) {
        u64 prod = 1;
        for (const auto& pc : nt::crt_pieces(q)) {
            prod *= pc.pp.value;
            EXPECT_EQ(pc.cofactor * pc.pp.value, q);
            EXPECT_EQ(nt::mulmod(pc.cofactor % pc.pp.value, pc.cofactor_inverse, pc.pp.value), 1 % pc.pp.value);
        }
        EXPECT_EQ(prod, q);
    }
}
