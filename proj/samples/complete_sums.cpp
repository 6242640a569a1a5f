// Complete sums S(q; a1, ak) for a few moduli, direct and via CRT.
#include <cstdio>

#include "weylsum.hpp"

int main() {
    using namespace weylsum;
    const CompleteSumArgs cases[] = {{3, 0, 1, 3}, {15, 2, 7, 3}, {25, 0, 1, 3}, {27, 0, 1, 3}, {360, 11, 7, 2}};
    std::printf("%6s %4s %4s %2s %14s %14s\n", "q", "a1", "ak", "k", "|direct|", "|crt|");
    for (const auto& c : cases)
        std::printf("%6llu %4lld %4lld %2d %14.9f %14.9f\n", static_cast<unsigned long long>(c.q), static_cast<long long>(c.a1),
                    static_cast<long long>(c.ak), c.k, std::abs(complete_sum_direct(c)), std::abs(complete_sum_crt(c)));

    // p^2 closed form against the direct sum.
    const Complex fast = complete_sum_prime_square_cubic(7, 3, 5);
    const Complex slow = complete_sum_direct({49, 3, 5, 3});
    std::printf("S(49; 3, 5): closed form %.9f%+.9fi, direct %.9f%+.9fi\n", fast.real(), fast.imag(), slow.real(), slow.imag());
}
