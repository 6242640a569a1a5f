#pragma once

#include <random>
#include <string>
#include <vector>

#include "weylsum/calibration.hpp"
#include "weylsum/diophantine.hpp"
#include "weylsum/exp_sums.hpp"
#include "weylsum/weyl.hpp"

namespace weylsum {

// ---------------------------------------------------------------------------
// Second moment over a for S_{1,3}(p; a - c, a), three ways.
// ---------------------------------------------------------------------------

/// sum_{a=1}^{p-1} |S_{1,3}(p; a - c, a)|^2 by direct evaluation.
inline double cubic_moment_direct(u64 p, i64 c) {
    CompensatedSum<double> acc;
    for (u64 a = 1; a < p; ++a) acc.add(std::norm(complete_sum_direct({p, static_cast<i64>(a) - c, static_cast<i64>(a), 3})));
    return acc.value();
}

/// p^2 + p sum_m sum_{h : 3m^2 + 3hm + h^2 + 1 = 0 (p)} e(ch/p), 1 <= h <= p-1,
/// less the a = 0 term |S(p; -c, 0)|^2, which is p^2 when p | c.
inline double cubic_moment_congruence(u64 p, i64 c) {
    CompensatedComplex inner;
    for (u64 m = 1; m <= p; ++m)
        for (u64 h = 1; h < p; ++h) {
            u64 v = (3 * nt::mulmod(m, m, p) + 3 * nt::mulmod(h, m, p) + nt::mulmod(h, h, p) + 1) % p;
            if (v == 0) inner.add(root_of_unity(static_cast<i64>(nt::mulmod(nt::mod(c, p), h, p)), static_cast<i64>(p)));
        }
    double pd = static_cast<double>(p);
    const double a0 = nt::mod(c, p) == 0 ? pd * pd : 0.0;
    return pd * pd + pd * inner.value().real() - a0;
}

/// p^2 - p (1 + (-3/p)) + p sum_{h=1}^{p} e(ch/p) ((-3h^2 - 12)/p), for p > 3.
inline double cubic_moment_legendre(u64 p, i64 c) {
    require(p > 3 && nt::is_prime(p), "cubic moment: Legendre form needs a prime p > 3");
    CompensatedComplex acc;
    for (u64 h = 1; h <= p; ++h) {
        int chi = nt::legendre(-3 * static_cast<i64>(nt::mulmod(h, h, p)) - 12, p);
        if (chi != 0) acc.add(static_cast<double>(chi) * root_of_unity(static_cast<i64>(nt::mulmod(nt::mod(c, p), h, p)), static_cast<i64>(p)));
    }
    double pd = static_cast<double>(p);
    return pd * pd - pd * (1.0 + nt::legendre(-3, p)) + pd * acc.value().real();
}

/// sum_{h=1}^{p-1} e(ch/p) ((-3h^2 - 12)/p).
inline Complex cubic_character_sum(u64 p, i64 c) {
    CompensatedComplex acc;
    for (u64 h = 1; h < p; ++h) {
        int chi = nt::legendre(-3 * static_cast<i64>(nt::mulmod(h, h, p)) - 12, p);
        acc.add(static_cast<double>(chi) * root_of_unity(static_cast<i64>(nt::mulmod(nt::mod(c, p), h, p)), static_cast<i64>(p)));
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// Search for a with |S_{1,3}(q; a - c, a)| large.
// ---------------------------------------------------------------------------

struct A3Search {
    i64 a = 1;
    double s_abs = 1.0;
    bool exhaustive = true;
    bool threshold_met = true;
    double threshold = 0.0;
};

namespace detail {

inline constexpr u64 kExhaustiveLimit = 10000;
inline constexpr std::size_t kRandomSamples = 10000;

struct ComponentBest {
    u64 a = 1;
    double s_abs = 0.0;
    bool exhaustive = true;
};

// max over units a mod m of |S(m; a - c, a)|. With W(y) = sum over x with
// x + x^3 = y of e(-c x / m), one has S(m; a - c, a) = sum_y W(y) e(a y / m).
inline ComponentBest best_component(u64 m, u64 c, u64 seed) {
    std::vector<Complex> roots(m);
    for (u64 r = 0; r < m; ++r) roots[r] = root_of_unity(static_cast<i64>(r), static_cast<i64>(m));
    std::vector<Complex> W(m, Complex{0.0, 0.0});
    for (u64 x = 0; x < m; ++x) {
        u64 y = (x + nt::powmod(x, 3, m)) % m;
        W[y] += roots[(m - nt::mulmod(c, x, m)) % m];
    }
    std::vector<std::pair<u64, Complex>> support;
    for (u64 y = 0; y < m; ++y)
        if (std::norm(W[y]) > 1e-24) support.push_back({y, W[y]});
    auto evaluate = [&](u64 a) {
        Complex acc{0.0, 0.0};
        for (const auto& [y, w] : support) acc += w * roots[nt::mulmod(a, y, m)];
        return std::abs(acc);
    };
    ComponentBest best;
    if (m <= kExhaustiveLimit) {
        for (u64 a = 1; a < m; ++a) {
            if (std::gcd(a, m) != 1) continue;
            double v = evaluate(a);
            if (v > best.s_abs + 1e-12) best = {a, v, true};
        }
        return best;
    }
    best.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<u64> pick(1, m - 1);
    for (std::size_t i = 0; i < kRandomSamples; ++i) {
        u64 a = pick(rng);
        if (std::gcd(a, m) != 1) continue;
        double v = evaluate(a);
        if (v > best.s_abs + 1e-12) best = {a, v, false};
    }
    return best;
}

}  // namespace detail

/// a in [1, q], gcd(a, q) = 1, maximising |S_{1,3}(q; a - c, a)|. The sum
/// factors over the prime-power parts of q, so each part is searched on its
/// own (exhaustively up to 10^4, else by 10^4 random samples) and the winners
/// are recombined by CRT.
inline A3Search find_a3(u64 q, i64 c, u64 seed = 0, double threshold = default_calibration().find_a3_threshold) {
    require(q >= 1 && q % 2 == 1, "find_a3: q must be odd and positive");
    require(nt::gcd(c, static_cast<i64>(q)) == 1, "find_a3: need gcd(q, c) = 1");
    A3Search res;
    res.threshold = threshold * std::pow(static_cast<double>(q), 0.45);
    if (q == 1) {
        res.threshold_met = res.s_abs >= res.threshold;
        return res;
    }
    u128 a = 0;
    const auto pieces = nt::crt_pieces(q);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        const u64 m = pc.pp.value;
        const u64 ci = nt::mulmod(nt::mod(c, m), pc.cofactor_inverse, m);
        auto best = detail::best_component(m, ci, mix_seed(seed, i));
        res.exhaustive = res.exhaustive && best.exhaustive;
        // a u_i = a_i (mod m_i) with u_i the inverse cofactor, i.e. a = a_i (q/m_i).
        a = (a + static_cast<u128>(best.a) * pc.cofactor) % q;
    }
    res.a = static_cast<i64>(a == 0 ? q : a);
    res.s_abs = std::abs(complete_sum_crt({q, res.a - c, res.a, 3}));
    res.threshold_met = res.s_abs >= res.threshold;
    return res;
}

// ---------------------------------------------------------------------------
// Lower-bound witnesses.
// ---------------------------------------------------------------------------

struct WitnessReport {
    std::string gamma;
    int k = 2;
    i64 q = 1;
    i64 c = 0;
    i64 a_k = 1;
    i64 a_1 = 0;
    double delta = 0.0;
    double Q = 1.0;
    DD alpha;
    double beta1 = 0.0;
    double f_abs = 0.0;
    double predicted = 0.0;
    double s_abs = 0.0;
    double ratio = 0.0;  // f_abs / Q^{3/4 - 2 delta}
    bool passed = false;
};

namespace detail {

inline i64 witness_top_coefficient(int k, const Convergent& cv, u64 seed) {
    const u64 q = static_cast<u64>(cv.q);
    if (k == 3) return find_a3(q, cv.c, seed).a;
    for (u64 a = 1; a <= q; ++a)
        if (std::gcd(a, q) == 1) return static_cast<i64>(a);
    return 1;
}

// Evaluates the witness built from convergent cv at scale Q.
inline WitnessReport witness_from_convergent(const PreciseReal& gamma, int k, double delta, const Convergent& cv, i64 ak,
                                            double Q, double calibration) {
    WitnessReport w;
    w.gamma = gamma.text;
    w.k = k;
    w.q = cv.q;
    w.c = cv.c;
    w.a_k = ak;
    w.a_1 = ak - cv.c;
    w.delta = delta;
    w.Q = Q;
    const DD top = dd_ratio(ak, cv.q);  // alpha + gamma = a_k / q exactly
    w.alpha = top - gamma.to_dd();
    w.beta1 = static_cast<double>(HighReal(cv.c) / HighReal(cv.q) - gamma.value);
    w.f_abs = std::abs(weyl_sum_binomial(w.alpha, top, k, DyadicRange{Q}));
    const double shape = std::pow(Q, 0.75 - 2.0 * delta);
    w.predicted = calibration * shape;
    w.ratio = w.f_abs / shape;
    w.s_abs = std::abs(complete_sum(static_cast<u64>(cv.q), w.a_1, ak, k));
    w.passed = w.f_abs >= w.predicted;
    return w;
}

}  // namespace detail

/// Witness from the first odd convergent q >= qmin, evaluated at Q = q^{2/(1+2 delta)}.
inline WitnessReport lower_bound_witness(const PreciseReal& gamma, int k, double delta, i64 qmin, u64 seed = 0,
                                         double calibration = default_calibration().witness_floor) {
    require(k == 2 || k == 3, "witness: k must be 2 or 3");
    require(delta > 0.0 && delta <= 0.1, "witness: need 0 < delta <= 0.1");
    const Convergent cv = odd_convergent(gamma.value, qmin);
    const i64 ak = detail::witness_top_coefficient(k, cv, seed);
    const double Q = std::pow(static_cast<double>(cv.q), 2.0 / (1.0 + 2.0 * delta));
    return detail::witness_from_convergent(gamma, k, delta, cv, ak, Q, calibration);
}

/// Best witness at a prescribed scale Q: every odd convergent with
/// qmin <= q <= Q^{(1+2 delta)/2}, plus the first odd one beyond, is
/// evaluated at Q and the largest |f| is kept.
inline WitnessReport witness_at_scale(const PreciseReal& gamma, int k, double delta, double Q, u64 seed = 0,
                                      double calibration = default_calibration().witness_floor, i64 qmin = 1) {
    require(k == 2 || k == 3, "witness: k must be 2 or 3");
    require(delta > 0.0 && delta <= 0.1, "witness: need 0 < delta <= 0.1");
    require(Q >= 1.0, "witness: Q must be at least 1");
    const double qcap = std::pow(Q, (1.0 + 2.0 * delta) / 2.0);
    std::vector<Convergent> chosen;
    for (const auto& cv : continued_fraction(gamma.value, 200)) {
        if (cv.q % 2 == 0 || cv.q < qmin) continue;
        chosen.push_back(cv);
        if (static_cast<double>(cv.q) > qcap) break;
    }
    if (chosen.empty() || static_cast<double>(chosen.back().q) <= qcap)
        throw NumericalFailure("witness: convergents exhausted below scale " + std::to_string(Q));
    std::vector<WitnessReport> reports(chosen.size());
    parallel_for(chosen.size(), [&](std::size_t i) {
        const i64 ak = detail::witness_top_coefficient(k, chosen[i], mix_seed(seed, i));
        reports[i] = detail::witness_from_convergent(gamma, k, delta, chosen[i], ak, Q, calibration);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (reports[i].f_abs > reports[best].f_abs) best = i;
    return reports[best];
}

// ---------------------------------------------------------------------------
// Grid search for sup over alpha of |f_{1,k}(alpha, alpha + gamma; Q)|.
// ---------------------------------------------------------------------------

struct SupSearchOptions {
    std::size_t coarse = 0;        // 0 selects 4 ceil(Q^k), capped
    bool allow_coarse = false;     // accept grids below 4 ceil(Q^k)
    int refine_iters = 40;
    std::size_t peaks = 10;
    std::vector<DD> seeds;         // extra refinement centres
    std::size_t cap = 10000000;
};

struct SupSearchResult {
    double alpha_star = 0.0;
    double value = 0.0;
    std::size_t grid = 0;
    std::vector<std::string> warnings;
};

inline double diagonal_abs(DD alpha, const DD& gamma, int k, double Q) {
    return std::abs(weyl_sum_binomial(alpha, alpha + gamma, k, DyadicRange{Q}));
}

namespace detail {

// Golden-section maximisation of |f| on [lo, hi].
inline std::pair<DD, double> golden_refine(DD lo, DD hi, const DD& gamma, int k, double Q, int iters) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](DD a) { return diagonal_abs(a, gamma, k, Q); };
    DD x1 = hi - (hi - lo) * r, x2 = lo + (hi - lo) * r;
    double f1 = eval(x1), f2 = eval(x2);
    DD best_x = f1 >= f2 ? x1 : x2;
    double best_f = std::max(f1, f2);
    for (int i = 0; i < iters; ++i) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * r;
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * r;
            f2 = eval(x2);
        }
        if (f1 > best_f) best_f = f1, best_x = x1;
        if (f2 > best_f) best_f = f2, best_x = x2;
    }
    return {best_x, best_f};
}

}  // namespace detail

/// Lower bound for sup_alpha |f_{1,k}(alpha, alpha + gamma; Q)|. Since
/// n + n^k is even, f has period 1/2 in alpha and only [0, 1/2) is scanned.
/// The coarse grid is followed by golden-section refinement around the
/// highest local maxima and any supplied seeds.
inline SupSearchResult sup_search(const PreciseReal& gamma, int k, double Q, const SupSearchOptions& opt = {}) {
    require(k >= 2, "sup search: k must be at least 2");
    require(Q >= 1.0, "sup search: Q must be at least 1");
    require(opt.refine_iters >= 0, "sup search: refine iterations must be non-negative");
    SupSearchResult res;
    const double required = 4.0 * std::ceil(std::pow(Q, k));
    std::size_t grid = opt.coarse;
    if (grid == 0) {
        grid = static_cast<std::size_t>(std::min(required, static_cast<double>(opt.cap)));
        if (required > static_cast<double>(opt.cap))
            res.warnings.push_back("coarse grid capped at " + std::to_string(opt.cap) + " points; sup may be undersampled");
    } else if (static_cast<double>(grid) < required) {
        require(opt.allow_coarse, "sup search: coarse grid below 4 ceil(Q^k) points");
        res.warnings.push_back("coarse grid below 4 ceil(Q^k); sup may be undersampled");
    }
    require(grid >= 2, "sup search: grid too small");
    res.grid = grid;

    const DD g = gamma.to_dd();
    const auto terms = binomial_diagonal_terms(g, k, DyadicRange{Q});
    const DD step = dd_ratio(0.5, static_cast<double>(grid));
    const UniformGrid ug{DD(0.0), step, grid};
    const auto mags = magnitudes_on_grid(terms, ug);

    std::vector<std::size_t> peaks;
    for (std::size_t j = 0; j < grid; ++j) {
        const double l = mags[(j + grid - 1) % grid], r = mags[(j + 1) % grid];
        if (mags[j] >= l && mags[j] >= r) peaks.push_back(j);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return mags[a] > mags[b]; });
    if (peaks.size() > opt.peaks) peaks.resize(opt.peaks);

    std::vector<DD> centres;
    for (auto j : peaks) centres.push_back(ug.at(j));
    for (const auto& s : opt.seeds) centres.push_back(s);
    std::vector<std::pair<DD, double>> refined(centres.size());
    parallel_for(centres.size(), [&](std::size_t i) {
        const DD c = centres[i];
        double base = diagonal_abs(c, g, k, Q);
        auto r = detail::golden_refine(c - step, c + step, g, k, Q, opt.refine_iters);
        refined[i] = r.second > base ? r : std::pair<DD, double>{c, base};
    });

    DD best_alpha(0.0);
    double best = -1.0;
    for (std::size_t j = 0; j < grid; ++j)
        if (mags[j] > best) best = mags[j], best_alpha = ug.at(j);
    for (const auto& [a, v] : refined)
        if (v > best) best = v, best_alpha = a;
    res.value = best;
    res.alpha_star = frac(best_alpha).value();
    return res;
}

// ---------------------------------------------------------------------------
// Exponent regression.
// ---------------------------------------------------------------------------

enum class ThetaMode { Witness, Grid };

struct ThetaPoint {
    double Q = 0.0;
    double estimate = 0.0;
    i64 q = 0;
    i64 c = 0;
    i64 a_k = 0;
    double alpha = 0.0;
};

struct ThetaResult {
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::vector<ThetaPoint> points;
    std::vector<std::string> warnings;
};

struct ThetaOptions {
    double delta = 0.02;
    u64 seed = 0;
    i64 qmin = 1;  // witness mode: smallest convergent denominator used
    SupSearchOptions grid;
};

inline ThetaResult theta_regression(const PreciseReal& gamma, int k, const std::vector<double>& Qs, ThetaMode mode,
                                    const ThetaOptions& opt = {}) {
    require(Qs.size() >= 5, "theta regression: at least five scales required");
    for (std::size_t i = 1; i < Qs.size(); ++i) require(Qs[i] > Qs[i - 1], "theta regression: scales must increase");
    ThetaResult res;
    for (std::size_t i = 0; i < Qs.size(); ++i) {
        ThetaPoint pt;
        pt.Q = Qs[i];
        if (mode == ThetaMode::Witness) {
            auto w = witness_at_scale(gamma, k, opt.delta, Qs[i], mix_seed(opt.seed, i),
                                      default_calibration().witness_floor, opt.qmin);
            pt.estimate = w.f_abs;
            pt.q = w.q;
            pt.c = w.c;
            pt.a_k = w.a_k;
            pt.alpha = frac(w.alpha).value();
        } else {
            auto s = sup_search(gamma, k, Qs[i], opt.grid);
            pt.estimate = s.value;
            pt.alpha = s.alpha_star;
            for (auto& wmsg : s.warnings) res.warnings.push_back(wmsg);
        }
        res.points.push_back(pt);
    }
    std::vector<double> x, y;
    for (const auto& p : res.points) {
        x.push_back(std::log(p.Q));
        y.push_back(std::log(p.estimate));
    }
    auto fit = fit_line(x, y);
    res.slope = fit.slope;
    res.stderr_slope = fit.stderr_slope;
    return res;
}

}  // namespace weylsum
