#pragma once

#include <vector>

#include "weylsum/core.hpp"
#include "weylsum/number_theory.hpp"
#include "weylsum/precise.hpp"

namespace weylsum {

struct Convergent {
    i64 c = 0;
    i64 q = 1;
    double err = 0.0;  // gamma - c/q
};

inline constexpr i64 kMaxConvergentDenominator = 1000000000000000LL;  // 10^15

/// First n convergents of gamma. Stops early once the next denominator would
/// exceed 10^15 or the expansion terminates (gamma rational at working precision).
inline std::vector<Convergent> continued_fraction(const HighReal& gamma, int n) {
    require(n >= 1, "continued fraction: n must be positive");
    std::vector<Convergent> out;
    i128 p_prev = 1, q_prev = 0;
    HighReal x = gamma;
    HighReal a = boost::multiprecision::floor(x);
    i128 p = static_cast<i128>(static_cast<i64>(a)), q = 1;
    const HighReal resolution("1e-45");
    for (int i = 0; i < n; ++i) {
        out.push_back({static_cast<i64>(p), static_cast<i64>(q),
                       static_cast<double>(gamma - HighReal(static_cast<i64>(p)) / HighReal(static_cast<i64>(q)))});
        HighReal rem = x - a;
        if (boost::multiprecision::abs(rem) < resolution) break;
        x = 1 / rem;
        a = boost::multiprecision::floor(x);
        const i64 ai = static_cast<i64>(a);
        const i128 p_next = static_cast<i128>(ai) * p + p_prev;
        const i128 q_next = static_cast<i128>(ai) * q + q_prev;
        if (q_next > kMaxConvergentDenominator) break;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    return out;
}

inline std::vector<Convergent> continued_fraction(const PreciseReal& gamma, int n) {
    return continued_fraction(gamma.value, n);
}

/// First convergent with odd denominator q >= qmin.
inline Convergent odd_convergent(const HighReal& gamma, i64 qmin) {
    for (const auto& cv : continued_fraction(gamma, 200))
        if (cv.q % 2 == 1 && cv.q >= qmin) return cv;
    throw NumericalFailure("odd convergent: precision exhausted before q >= " + std::to_string(qmin));
}

struct DirichletApprox {
    i64 a = 0;
    i64 q = 1;
    double beta = 0.0;  // alpha - a/q
};

/// a/q with gcd(a, q) = 1, q <= Qbound and |alpha - a/q| <= 1/(q Qbound): the
/// last convergent with q <= Qbound, verified in high precision.
inline DirichletApprox dirichlet_approx(const HighReal& alpha, double Qbound) {
    require(Qbound >= 1.0, "dirichlet approximation: Qbound must be at least 1");
    const HighReal Qb(Qbound);
    auto admissible = [&](i64 a, i64 q) {
        HighReal diff = boost::multiprecision::abs(alpha - HighReal(a) / HighReal(q));
        return diff * HighReal(q) * Qb <= 1;
    };
    auto pack = [&](i64 a, i64 q) {
        return DirichletApprox{a, q, static_cast<double>(alpha - HighReal(a) / HighReal(q))};
    };
    Convergent best;
    bool found = false;
    for (const auto& cv : continued_fraction(alpha, 200)) {
        if (static_cast<double>(cv.q) > Qbound) break;
        best = cv;
        found = true;
    }
    if (found && admissible(best.c, best.q)) return pack(best.c, best.q);
    // Fallback scan; only reached near the precision limit.
    const i64 qmax = static_cast<i64>(std::floor(Qbound));
    for (i64 q = 1; q <= qmax; ++q) {
        i64 a = static_cast<i64>(boost::multiprecision::round(alpha * HighReal(q)));
        if (nt::gcd(a, q) == 1 && admissible(a, q)) return pack(a, q);
    }
    throw NumericalFailure("dirichlet approximation: no admissible fraction found");
}

inline DirichletApprox dirichlet_approx(double alpha, double Qbound) { return dirichlet_approx(HighReal(alpha), Qbound); }

/// q = q2 q3 with q2 collecting p^t || q for t in {1, 2} and q3 those with t >= 3;
/// kappa = q2^{1/2} q3^{1/3}.
struct KappaFactorization {
    u64 q2 = 1;
    u64 q3 = 1;
    double kappa = 1.0;
};

inline KappaFactorization kappa_factor(u64 q) {
    require(q >= 1, "kappa: q must be positive");
    KappaFactorization kf;
    for (const auto& pp : nt::factorize(q)) (pp.t <= 2 ? kf.q2 : kf.q3) *= pp.value;
    kf.kappa = std::sqrt(static_cast<double>(kf.q2)) * std::cbrt(static_cast<double>(kf.q3));
    return kf;
}

struct Gamma0Violation {
    i64 q = 1;
    i64 c = 0;
};

namespace detail {

// (q2, q3) for every q <= n via a smallest-prime-factor sieve.
inline std::vector<std::pair<u64, u64>> kappa_split_table(u64 n) {
    std::vector<u64> spf(n + 1, 0);
    for (u64 i = 2; i <= n; ++i) {
        if (spf[i] != 0) continue;
        for (u64 j = i; j <= n; j += i)
            if (spf[j] == 0) spf[j] = i;
    }
    std::vector<std::pair<u64, u64>> out(n + 1, {1, 1});
    for (u64 q = 2; q <= n; ++q) {
        u64 m = q, q2 = 1, q3 = 1;
        while (m > 1) {
            u64 p = spf[m], pv = 1;
            int t = 0;
            while (m % p == 0) {
                m /= p;
                pv *= p;
                ++t;
            }
            (t <= 2 ? q2 : q3) *= pv;
        }
        out[q] = {q2, q3};
    }
    return out;
}

}  // namespace detail

/// Pairs (q, c), q <= Qmax, gcd(c, q) = 1, with
/// |gamma - c/q| <= q2^{-2-delta} q3^{-4/3-delta}.
inline std::vector<Gamma0Violation> gamma0_violations(const HighReal& gamma, double delta, u64 Qmax) {
    require(delta > 0.0, "gamma0 scan: delta must be positive");
    require(Qmax >= 1 && Qmax <= 1000000, "gamma0 scan: need 1 <= Qmax <= 10^6");
    const auto split = detail::kappa_split_table(Qmax);
    const DD g = [&] {
        double hi = static_cast<double>(gamma);
        return quick_two_sum(hi, static_cast<double>(gamma - HighReal(hi)));
    }();
    constexpr u64 kChunk = 4096;
    const std::size_t chunks = (Qmax + kChunk - 1) / kChunk;
    std::vector<std::vector<Gamma0Violation>> found(chunks);
    parallel_for(chunks, [&](std::size_t ci) {
        const u64 lo = 1 + ci * kChunk, hi = std::min<u64>(Qmax, lo + kChunk - 1);
        for (u64 q = lo; q <= hi; ++q) {
            const auto [q2, q3] = split[q];
            const double tol = std::pow(static_cast<double>(q2), -2.0 - delta) *
                               std::pow(static_cast<double>(q3), -4.0 / 3.0 - delta) * static_cast<double>(q);
            const DD gq = g * static_cast<double>(q);
            const double fl = std::floor(gq.hi) + std::floor(gq.hi - std::floor(gq.hi) + gq.lo);
            for (double c : {fl, fl + 1.0}) {
                // |gamma q - c| <= q * bound
                if (std::fabs((gq - DD(c)).value()) > tol) continue;
                const i64 ci64 = static_cast<i64>(c);
                if (nt::gcd(ci64, static_cast<i64>(q)) != 1) continue;
                found[ci].push_back({static_cast<i64>(q), ci64});
            }
        }
    });
    std::vector<Gamma0Violation> out;
    for (const auto& v : found) out.insert(out.end(), v.begin(), v.end());
    return out;
}

struct KhinchineMinimum {
    double value = 0.0;  // min over q of q^2 (log 2q)^2 |gamma - c/q|
    i64 q = 1;
};

inline KhinchineMinimum khinchine_minimum(const HighReal& gamma, u64 Qmax) {
    require(Qmax >= 1, "khinchine: Qmax must be positive");
    double hi = static_cast<double>(gamma);
    const DD g = quick_two_sum(hi, static_cast<double>(gamma - HighReal(hi)));
    KhinchineMinimum best{std::numeric_limits<double>::infinity(), 1};
    for (u64 q = 1; q <= Qmax; ++q) {
        const DD gq = g * static_cast<double>(q);
        const DD f = frac(gq);
        const double dist = std::min(f.value(), 1.0 - f.value());  // ||q gamma||
        const double l = std::log(2.0 * static_cast<double>(q));
        const double v = static_cast<double>(q) * l * l * dist;
        if (v < best.value) best = {v, static_cast<i64>(q)};
    }
    return best;
}

}  // namespace weylsum
