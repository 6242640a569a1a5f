#pragma once

#include "weylsum/core.hpp"
#include "weylsum/number_theory.hpp"

namespace weylsum {

/// Complete sum S(q; a1, ak) = sum_{x=1}^{q} e((a1 x + ak x^k) / q).
struct CompleteSumArgs {
    u64 q = 1;
    i64 a1 = 0;
    i64 ak = 0;
    int k = 3;

    void validate() const {
        require(q >= 1, "complete sum: modulus q must be positive");
        require(k >= 2, "complete sum: degree k must be at least 2");
    }
};

namespace detail {

inline Complex direct_sum_reduced(u64 q, u64 b, u64 a, int k) {
    CompensatedComplex acc;
    for (u64 x = 1; x <= q; ++x) {
        u64 xk = nt::powmod(x, static_cast<u64>(k), q);
        u64 r = static_cast<u64>((static_cast<u128>(b) * (x % q) + static_cast<u128>(a) * xk) % q);
        acc.add(root_of_unity(static_cast<i64>(r), static_cast<i64>(q)));
    }
    return acc.value();
}

inline Complex prime_square_cubic_reduced(u64 p, u64 b, u64 a) {
    const u64 p2 = p * p;
    // u solves b + 3 a u^2 = 0 (mod p), u taken in [1, p].
    u64 rhs = nt::mulmod(nt::mod(-static_cast<i64>(b % p), p), nt::modinv(nt::mulmod(3, a % p, p), p), p);
    std::vector<u64> roots = nt::sqrt_mod_prime(static_cast<i64>(rhs), p);
    Complex total{0.0, 0.0};
    for (u64 u : roots) {
        if (u == 0) u = p;
        u64 u3 = nt::powmod(u, 3, p2);
        u64 r = static_cast<u64>((static_cast<u128>(b) * u + static_cast<u128>(a) * u3) % p2);
        total += root_of_unity(static_cast<i64>(r), static_cast<i64>(p2));
    }
    return static_cast<double>(p) * total;
}

inline Complex prime_power_sum(const nt::PrimePower& pp, u64 b, u64 a, int k) {
    if (k == 3 && pp.t == 2 && pp.p > 3 && a % pp.p != 0) return prime_square_cubic_reduced(pp.p, b, a);
    return direct_sum_reduced(pp.value, b, a, k);
}

}  // namespace detail

/// Direct O(q) evaluation. Phases are formed exactly as integers modulo q and
/// converted to floating point once per term.
inline Complex complete_sum_direct(const CompleteSumArgs& args) {
    args.validate();
    return detail::direct_sum_reduced(args.q, nt::mod(args.a1, args.q), nt::mod(args.ak, args.q), args.k);
}

/// Multiplicative evaluation: the sum factors over the prime-power pieces of q,
/// each piece seeing its coefficients multiplied by the inverse cofactor.
inline Complex complete_sum_crt(const CompleteSumArgs& args) {
    args.validate();
    if (args.q == 1) return {1.0, 0.0};
    const u64 b = nt::mod(args.a1, args.q);
    const u64 a = nt::mod(args.ak, args.q);
    Complex product{1.0, 0.0};
    for (const auto& piece : nt::crt_pieces(args.q)) {
        const u64 m = piece.pp.value;
        u64 bi = nt::mulmod(b % m, piece.cofactor_inverse, m);
        u64 ai = nt::mulmod(a % m, piece.cofactor_inverse, m);
        product *= detail::prime_power_sum(piece.pp, bi, ai, args.k);
    }
    return product;
}

/// S_{1,3}(p^2; b, a) for a prime p > 3 with p not dividing a. Only the
/// residues u with b + 3 a u^2 = 0 (mod p) survive the sum over the top digit.
inline Complex complete_sum_prime_square_cubic(u64 p, i64 b, i64 a) {
    require(p > 3 && nt::is_prime(p), "prime-square fast path needs a prime p > 3");
    require(nt::mod(a, p) != 0, "prime-square fast path needs p not dividing a");
    const u64 p2 = p * p;
    return detail::prime_square_cubic_reduced(p, nt::mod(b, p2), nt::mod(a, p2));
}

inline Complex complete_sum(u64 q, i64 a1, i64 ak, int k) { return complete_sum_crt({q, a1, ak, k}); }

}  // namespace weylsum
