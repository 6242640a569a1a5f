#pragma once

#include <random>
#include <set>
#include <vector>

#include "weylsum/calibration.hpp"
#include "weylsum/exp_sums.hpp"
#include "weylsum/oscillatory.hpp"
#include "weylsum/weyl.hpp"

namespace weylsum {

/// alpha1 = a1/q + beta1, alphak = ak/q + betak, with the alphas carried in
/// double-double so the rational part survives large n^k.
struct MultiApprox {
    u64 q = 1;
    i64 a1 = 0;
    i64 ak = 0;
    double beta1 = 0.0;
    double betak = 0.0;
    int k = 3;

    DD alpha1() const { return dd_ratio(a1, static_cast<i64>(q)) + DD(beta1); }
    DD alphak() const { return dd_ratio(ak, static_cast<i64>(q)) + DD(betak); }

    void validate() const {
        require(q >= 1, "approximation: q must be positive");
        require(k >= 2, "approximation: k must be at least 2");
        require(nt::gcd(static_cast<i64>(q), ak) == 1, "approximation: need gcd(q, ak) = 1");
        require(std::fabs(beta1) * 2.0 * static_cast<double>(q) <= 1.0, "approximation: need |beta1| <= 1/(2q)");
        require(std::isfinite(betak), "approximation: betak must be finite");
    }
};

/// All integers e minimising |num/den - e|; two of them at half-integers.
inline std::vector<i64> nearest_integers(i64 num, i64 den) {
    require(den >= 1, "nearest integers: denominator must be positive");
    i64 fl = num / den;
    i64 rem = num % den;
    if (rem < 0) {
        rem += den;
        --fl;
    }
    const i128 twice = 2 * static_cast<i128>(rem);
    if (twice < den) return {fl};
    if (twice > den) return {fl + 1};
    return {fl, fl + 1};
}

struct DaggerTerm {
    u64 d = 1;
    i64 e = 0;
    i64 numerator = 0;  // d e
    u64 center_den = 1;  // q / d; the centre e/(q/d) is reduced
    bool leading = false;
};

/// Divisor terms of the extended main term: for each d | q and each nearest
/// integer e to a1/d with gcd(e, q/d) = 1, one term per distinct value d e.
inline std::vector<DaggerTerm> dagger_terms(u64 q, i64 a1) {
    require(q >= 1, "dagger terms: q must be positive");
    const u64 g = nt::gcd(a1, static_cast<i64>(q));
    std::vector<DaggerTerm> out;
    std::set<i64> seen;
    for (u64 d : nt::divisors(q)) {
        const u64 rest = q / d;
        for (i64 e : nearest_integers(a1, static_cast<i64>(d))) {
            if (nt::gcd(e, static_cast<i64>(rest)) != 1) continue;
            const i64 num = static_cast<i64>(d) * e;
            if (!seen.insert(num).second) continue;
            out.push_back({d, e, num, rest, d == g});
        }
    }
    return out;
}

namespace detail {

inline Complex range_integral(double beta1, double betak, int k, const SumRange& range) {
    auto [lo, hi] = integration_bounds(range);
    if (betak == 0.0) return integral_linear(beta1, lo, hi);
    return integral_quad({beta1, betak, k, {{lo, hi}}});
}

// alpha1 - numerator/q = (a1 - numerator)/q + beta1, formed without cancellation.
inline double shifted_beta(const MultiApprox& ma, i64 numerator) {
    return (dd_ratio(ma.a1 - numerator, static_cast<i64>(ma.q)) + DD(ma.beta1)).value();
}

inline Complex dagger_contribution(const MultiApprox& ma, const DaggerTerm& t, const SumRange& range) {
    const Complex s = complete_sum(ma.q, t.numerator, ma.ak, ma.k);
    return s * range_integral(shifted_beta(ma, t.numerator), ma.betak, ma.k, range) / static_cast<double>(ma.q);
}

}  // namespace detail

inline Complex weyl_sum_of(const MultiApprox& ma, const SumRange& range) {
    return weyl_sum_binomial(ma.alpha1(), ma.alphak(), ma.k, range);
}

/// q^{-1} sum over dagger terms of S(q; d e, ak) I(alpha1 - e/(q/d), betak; range).
inline Complex main_term(const MultiApprox& ma, const SumRange& range) {
    ma.validate();
    CompensatedComplex acc;
    for (const auto& t : dagger_terms(ma.q, ma.a1)) acc.add(detail::dagger_contribution(ma, t, range));
    return acc.value();
}

/// Secondary dagger terms only (d != gcd(q, a1)).
inline Complex secondary_terms(const MultiApprox& ma, const SumRange& range) {
    ma.validate();
    CompensatedComplex acc;
    for (const auto& t : dagger_terms(ma.q, ma.a1))
        if (!t.leading) acc.add(detail::dagger_contribution(ma, t, range));
    return acc.value();
}

/// f(a/q + beta) - q^{-1} S(q; a) I(beta).
inline Complex delta_classical(const MultiApprox& ma, const SumRange& range) {
    ma.validate();
    const Complex s = complete_sum(ma.q, ma.a1, ma.ak, ma.k);
    const Complex lead = s * detail::range_integral(ma.beta1, ma.betak, ma.k, range) / static_cast<double>(ma.q);
    return weyl_sum_of(ma, range) - lead;
}

inline Complex delta_classical(const MultiApprox& ma, double P) { return delta_classical(ma, SumRange{FullRange{P}}); }

struct ResidualReport {
    Complex direct;        // f - main term
    Complex via_classical; // delta_classical - secondary terms
    double discrepancy = 0.0;
};

inline ResidualReport delta_residual(const MultiApprox& ma, const SumRange& range) {
    ResidualReport r;
    const Complex f = weyl_sum_of(ma, range);
    r.direct = f - main_term(ma, range);
    r.via_classical = delta_classical(ma, range) - secondary_terms(ma, range);
    r.discrepancy = std::abs(r.direct - r.via_classical);
    return r;
}

inline double log_factor(double P) { return std::log(std::max(P, std::numbers::e)); }

/// |betak| <= 1/(4 k q P^{k-1}).
inline bool satisfies_small_betak(const MultiApprox& ma, double P) {
    return std::fabs(ma.betak) * 4.0 * ma.k * static_cast<double>(ma.q) * std::pow(P, ma.k - 1) <= 1.0;
}

/// Error shape of the extended main term: q^{1/2+eps} when betak is small
/// enough, otherwise q^{1/2+eps} (1 + |betak| P^k)^{1/2} log P.
inline double main_term_error_shape(const MultiApprox& ma, double P, double eps) {
    const double base = std::pow(static_cast<double>(ma.q), 0.5 + eps);
    if (satisfies_small_betak(ma, P)) return base;
    return base * std::sqrt(1.0 + std::fabs(ma.betak) * std::pow(P, ma.k)) * log_factor(P);
}

/// Upper-bound shape for the classical error including secondary terms.
inline double classical_error_shape(const MultiApprox& ma, double P, double eps) {
    const double q = static_cast<double>(ma.q);
    double secondary = 0.0;
    for (const auto& t : dagger_terms(ma.q, ma.a1))
        if (!t.leading) secondary += std::abs(complete_sum(ma.q, t.numerator, ma.ak, ma.k)) / std::sqrt(q);
    return std::pow(q, 0.5 + eps) * (1.0 + secondary) * std::sqrt(1.0 + std::fabs(ma.betak) * std::pow(P, ma.k)) *
           log_factor(P);
}

struct CubicBound {
    double value = 0.0;
    double bound = 0.0;
    double C = 0.0;
};

/// |f_{1,3}| against C (P^{1.05} / (q + q |beta3| P^3)^{1/3} + P^{0.8}).
inline CubicBound cubic_sup_bound(const MultiApprox& ma, double P, double C = default_calibration().cubic_sup_C) {
    ma.validate();
    require(ma.k == 3, "cubic bound: k must be 3");
    const double q = static_cast<double>(ma.q);
    const double denom = q * (1.0 + std::pow(P, 3) * std::fabs(ma.betak));
    require(denom <= 2.0 * std::pow(P, 1.5), "cubic bound: need q (1 + P^3 |beta3|) <= 2 P^{3/2}");
    CubicBound r;
    r.C = C;
    r.value = std::abs(weyl_sum_of(ma, FullRange{P}));
    r.bound = C * (std::pow(P, 1.05) / std::cbrt(denom) + std::pow(P, 0.8));
    return r;
}

// ---------------------------------------------------------------------------
// Randomised scans.
// ---------------------------------------------------------------------------

struct DeltaScanConfig {
    int k = 3;
    u64 qmax = 500;
    double Pmin = 100.0;
    double Pmax = 5000.0;
    std::size_t samples = 300;
    bool small_betak = true;  // draw betak inside |betak| <= 1/(4 k q P^{k-1})
    double betak_scale = 8.0; // otherwise |betak| up to this many times that limit
    u64 seed = 1;
    double eps = 0.05;
};

struct DeltaScanRow {
    MultiApprox ma;
    double P = 0.0;
    double f_abs = 0.0;
    double main_abs = 0.0;
    double delta_abs = 0.0;
    double shape = 0.0;
    double ratio = 0.0;
    bool small_betak = false;
};

inline MultiApprox random_approx(std::mt19937_64& rng, const DeltaScanConfig& cfg, double P) {
    MultiApprox ma;
    ma.k = cfg.k;
    ma.q = std::uniform_int_distribution<u64>(1, cfg.qmax)(rng);
    do {
        ma.ak = static_cast<i64>(std::uniform_int_distribution<u64>(0, ma.q - 1)(rng));
    } while (nt::gcd(static_cast<i64>(ma.q), ma.ak) != 1);
    ma.a1 = static_cast<i64>(std::uniform_int_distribution<u64>(0, ma.q - 1)(rng));
    const double half = 0.5 / static_cast<double>(ma.q);
    ma.beta1 = std::uniform_real_distribution<double>(-half, half)(rng);
    const double limit = 1.0 / (4.0 * cfg.k * static_cast<double>(ma.q) * std::pow(P, cfg.k - 1));
    const double span = cfg.small_betak ? limit : cfg.betak_scale * limit;
    ma.betak = std::uniform_real_distribution<double>(-span, span)(rng);
    return ma;
}

inline DeltaScanRow evaluate_scan_row(const MultiApprox& ma, double P, double eps) {
    DeltaScanRow row;
    row.ma = ma;
    row.P = P;
    const Complex f = weyl_sum_of(ma, FullRange{P});
    const Complex m = main_term(ma, FullRange{P});
    row.f_abs = std::abs(f);
    row.main_abs = std::abs(m);
    row.delta_abs = std::abs(f - m);
    row.small_betak = satisfies_small_betak(ma, P);
    row.shape = main_term_error_shape(ma, P, eps);
    row.ratio = row.delta_abs / row.shape;
    return row;
}

/// Randomised comparison of f against the extended main term. Sample i draws
/// from its own seeded stream, so rows do not depend on scheduling.
inline std::vector<DeltaScanRow> delta_scan(const DeltaScanConfig& cfg) {
    require(cfg.k >= 2 && cfg.qmax >= 1 && cfg.Pmin >= 1.0 && cfg.Pmax >= cfg.Pmin, "delta scan: bad configuration");
    std::vector<DeltaScanRow> rows(cfg.samples);
    parallel_for(cfg.samples, [&](std::size_t i) {
        std::mt19937_64 rng(mix_seed(cfg.seed, i));
        const double P = std::floor(std::uniform_real_distribution<double>(cfg.Pmin, cfg.Pmax)(rng));
        rows[i] = evaluate_scan_row(random_approx(rng, cfg, P), P, cfg.eps);
    });
    return rows;
}

}  // namespace weylsum
