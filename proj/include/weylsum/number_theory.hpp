#pragma once

#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "weylsum/core.hpp"

namespace weylsum::nt {

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Least non-negative residue of a modulo m.
inline u64 mod(i64 a, u64 m) {
    i128 r = static_cast<i128>(a) % static_cast<i128>(m);
    if (r < 0) r += m;
    return static_cast<u64>(r);
}

inline u64 gcd(i64 a, i64 b) {
    u64 x = a < 0 ? static_cast<u64>(-(a + 1)) + 1 : static_cast<u64>(a);
    u64 y = b < 0 ? static_cast<u64>(-(b + 1)) + 1 : static_cast<u64>(b);
    return std::gcd(x, y);
}

/// Inverse of a modulo m; requires gcd(a, m) = 1.
inline u64 modinv(u64 a, u64 m) {
    if (m == 1) return 0;
    i128 old_r = a % m, r = m;
    i128 old_s = 1, s = 0;
    while (r != 0) {
        i128 qt = old_r / r;
        i128 tmp = old_r - qt * r;
        old_r = r;
        r = tmp;
        tmp = old_s - qt * s;
        old_s = s;
        s = tmp;
    }
    require(old_r == 1, "modular inverse of a non-unit");
    old_s %= static_cast<i128>(m);
    if (old_s < 0) old_s += m;
    return static_cast<u64>(old_s);
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

struct PrimePower {
    u64 p = 0;
    int t = 0;
    u64 value = 1;  // p^t
};

using Factorization = std::vector<PrimePower>;

/// Trial division to 10^6, then Miller-Rabin on the cofactor. Moduli whose
/// cofactor is a product of two primes above 10^6 are out of range.
inline Factorization factorize(u64 n) {
    require(n >= 1, "factorize: n must be positive");
    Factorization out;
    auto take = [&](u64 p) {
        PrimePower pp{p, 0, 1};
        while (n % p == 0) {
            n /= p;
            ++pp.t;
            pp.value *= p;
        }
        out.push_back(pp);
    };
    if (n % 2 == 0) take(2);
    for (u64 p = 3; p <= 1000000 && p * p <= n; p += 2) {
        if (n % p == 0) take(p);
    }
    if (n > 1) {
        // A composite cofactor here has two prime factors above 10^6.
        require(is_prime(n), "factorize: modulus outside supported range");
        out.push_back({n, 1, n});
    }
    return out;
}

inline std::vector<u64> divisors(u64 n) {
    std::vector<u64> divs{1};
    for (const auto& pp : factorize(n)) {
        std::size_t len = divs.size();
        u64 mult = 1;
        for (int e = 1; e <= pp.t; ++e) {
            mult *= pp.p;
            for (std::size_t i = 0; i < len; ++i) divs.push_back(divs[i] * mult);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

inline u64 euler_phi(u64 n) {
    u64 phi = n;
    for (const auto& pp : factorize(n)) phi = phi / pp.p * (pp.p - 1);
    return phi;
}

inline int moebius(u64 n) {
    int mu = 1;
    for (const auto& pp : factorize(n)) {
        if (pp.t > 1) return 0;
        mu = -mu;
    }
    return mu;
}

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(i64 a, u64 p) {
    u64 r = mod(a, p);
    if (r == 0) return 0;
    return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

/// Square roots of a modulo an odd prime p (Tonelli-Shanks), smaller first.
/// Empty when a is a non-residue; a single root when a = 0.
inline std::vector<u64> sqrt_mod_prime(i64 a, u64 p) {
    u64 n = mod(a, p);
    if (n == 0) return {0};
    if (p == 2) return {n};
    if (legendre(static_cast<i64>(n), p) != 1) return {};
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (legendre(static_cast<i64>(z), p) != -1) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = powmod(z, q, p);
    u64 t = powmod(n, q, p);
    u64 r = powmod(n, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0;
        u64 tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    u64 other = p - r;
    return r < other ? std::vector<u64>{r, other} : std::vector<u64>{other, r};
}

/// Ramanujan sum c_q(h) = sum over a mod q, (a,q)=1, of e(ah/q).
inline i64 ramanujan_sum(u64 q, i64 h) {
    u64 g = gcd(static_cast<i64>(q), h);
    i64 total = 0;
    for (u64 d : divisors(g)) total += moebius(q / d) * static_cast<i64>(d);
    return total;
}

/// n^k as an exact 64-bit integer, if it fits.
inline std::optional<u64> checked_pow(u64 n, int k) {
    u128 acc = 1;
    for (int i = 0; i < k; ++i) {
        acc *= n;
        if (acc > static_cast<u128>(~0ULL)) return std::nullopt;
    }
    return static_cast<u64>(acc);
}

/// A modulus split into coprime prime-power pieces, each carrying the inverse
/// of its cofactor. For q = m_1 ... m_r one has a/q = sum_i (a u_i mod m_i)/m_i
/// with u_i = (q/m_i)^{-1} mod m_i.
struct CrtPiece {
    PrimePower pp;
    u64 cofactor = 1;
    u64 cofactor_inverse = 0;
};

inline std::vector<CrtPiece> crt_pieces(u64 q) {
    std::vector<CrtPiece> pieces;
    for (const auto& pp : factorize(q)) {
        CrtPiece piece;
        piece.pp = pp;
        piece.cofactor = q / pp.value;
        piece.cofactor_inverse = modinv(piece.cofactor % pp.value, pp.value);
        pieces.push_back(piece);
    }
    return pieces;
}

}  // namespace weylsum::nt
