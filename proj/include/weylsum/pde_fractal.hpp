#pragma once

#include <vector>

#include "weylsum/core.hpp"
#include "weylsum/number_theory.hpp"
#include "weylsum/precise.hpp"
#include "weylsum/weyl.hpp"

namespace weylsum {

/// Piecewise-constant function on [0, 2 pi): values[i] holds on
/// [breakpoints[i], breakpoints[i+1]), the last piece wrapping around to
/// breakpoints[0] + 2 pi.
struct StepFunction {
    std::vector<double> breakpoints;
    std::vector<double> values;

    void validate() const {
        require(breakpoints.size() >= 2, "step function: at least two breakpoints required");
        require(values.size() == breakpoints.size(), "step function: one value per piece");
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            require(breakpoints[i] >= 0.0 && breakpoints[i] < kTwoPi, "step function: breakpoints must lie in [0, 2 pi)");
            if (i > 0) require(breakpoints[i] > breakpoints[i - 1], "step function: breakpoints must increase");
        }
    }

    /// (1 / 2 pi) int |g|^2.
    double mean_square() const {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            double a = breakpoints[i];
            double b = i + 1 < breakpoints.size() ? breakpoints[i + 1] : breakpoints[0] + kTwoPi;
            s += values[i] * values[i] * (b - a);
        }
        return s / kTwoPi;
    }

    static StepFunction indicator(double lo, double hi) {
        StepFunction g;
        if (lo == 0.0) {
            g.breakpoints = {lo, hi};
            g.values = {1.0, 0.0};
        } else {
            g.breakpoints = {0.0, lo, hi};
            g.values = {0.0, 1.0, 0.0};
        }
        return g;
    }
};

/// Coefficients g^(n) for |n| <= N, stored at index n + N.
struct FourierCoeffs {
    int N = 0;
    std::vector<Complex> c;

    Complex at(int n) const { return c[static_cast<std::size_t>(n + N)]; }
};

inline FourierCoeffs fourier_coeffs(const StepFunction& g, int N) {
    g.validate();
    require(N >= 1, "fourier coefficients: N must be positive");
    FourierCoeffs out;
    out.N = N;
    out.c.assign(2 * static_cast<std::size_t>(N) + 1, Complex{0.0, 0.0});
    const std::size_t pieces = g.values.size();
    for (int n = -N; n <= N; ++n) {
        CompensatedComplex acc;
        for (std::size_t i = 0; i < pieces; ++i) {
            const double a = g.breakpoints[i];
            const double b = i + 1 < pieces ? g.breakpoints[i + 1] : g.breakpoints[0] + kTwoPi;
            if (n == 0) {
                acc.add(Complex{g.values[i] * (b - a) / kTwoPi, 0.0});
            } else {
                // v (e^{-ina} - e^{-inb}) / (2 pi i n)
                const Complex ea = std::polar(1.0, -n * a), eb = std::polar(1.0, -n * b);
                acc.add(g.values[i] * (ea - eb) / Complex(0.0, kTwoPi * n));
            }
        }
        out.c[static_cast<std::size_t>(n + N)] = acc.value();
    }
    return out;
}

struct Rational {
    i64 num = 1;
    i64 den = 1;
};

/// q_{k;r,c}(x) = sum_{|n|<=N} g^(n) e^{i (c - r x) n^k + i x n} at x_j = 2 pi j / M.
struct ObliqueRestriction {
    int k = 2;
    Rational r;
    double c = 0.0;
    int N = 0;
    std::vector<double> xs;
    std::vector<Complex> values;
    double truncation_l2 = 0.0;  // (sum_{|n|>N} |g^(n)|^2)^{1/2}
};

/// Direct evaluation on the grid. For r = u/v the x-dependent phase of term n
/// is 2 pi j (v n - u n^k) / (v M), so each term advances by an exact root of
/// unity from one grid point to the next.
inline ObliqueRestriction evolve_restrict(const FourierCoeffs& coeffs, double mean_square, int k, Rational r,
                                          const HighReal& c, std::size_t M) {
    require(k >= 2, "evolution: k must be at least 2");
    require(r.num != 0 && r.den > 0, "evolution: r must be a nonzero rational with positive denominator");
    require(M >= 2, "evolution: at least two grid points required");
    const i64 N = coeffs.N;
    require(nt::checked_pow(static_cast<u64>(N), k).has_value(), "evolution: N^k exceeds 64 bits");
    const u128 period = static_cast<u128>(r.den) * M;
    require(period < (static_cast<u128>(1) << 62), "evolution: v M too large");
    const i128 modulus = static_cast<i128>(period);

    const HighReal turns = c / (2 * high_pi());
    const DD c_turns = [&] {
        double hi = static_cast<double>(turns);
        return quick_two_sum(hi, static_cast<double>(turns - HighReal(hi)));
    }();

    std::vector<GridTerm> terms;
    terms.reserve(coeffs.c.size());
    double kept = 0.0;
    for (i64 n = -N; n <= N; ++n) {
        const Complex w = coeffs.at(static_cast<int>(n));
        kept += std::norm(w);
        if (w == Complex{0.0, 0.0}) continue;
        const u64 absn = static_cast<u64>(n < 0 ? -n : n);
        const u64 nk_abs = *nt::checked_pow(absn, k);
        const bool negative_power = n < 0 && (k % 2 == 1);
        const i128 nk = negative_power ? -static_cast<i128>(nk_abs) : static_cast<i128>(nk_abs);
        i128 m = (static_cast<i128>(r.den) * n - static_cast<i128>(r.num) * nk) % modulus;
        if (m < 0) m += modulus;
        // e^{i c n^k} = e(c n^k / 2 pi)
        DD offset = mul_mod1(c_turns, nk_abs);
        if (negative_power) offset = frac(-offset);
        terms.push_back({static_cast<u64>(m), offset, w});
    }
    ObliqueRestriction out;
    out.k = k;
    out.r = r;
    out.c = static_cast<double>(c);
    out.N = static_cast<int>(N);
    out.truncation_l2 = std::sqrt(std::max(0.0, mean_square - kept));
    const UniformGrid grid{DD(0.0), dd_ratio(1.0, static_cast<double>(period)), M};
    out.values = evaluate_on_grid(terms, grid);
    out.xs.resize(M);
    for (std::size_t j = 0; j < M; ++j) out.xs[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(M);
    return out;
}

inline ObliqueRestriction evolve_restrict(const StepFunction& g, int N, int k, Rational r, const HighReal& c,
                                          std::size_t M) {
    return evolve_restrict(fourier_coeffs(g, N), g.mean_square(), k, r, c, M);
}

// ---------------------------------------------------------------------------
// Graph roughness estimators. Samples are taken as uniform on [0, 1) and the
// values are rescaled to unit range, so the graph sits in the unit square.
// ---------------------------------------------------------------------------

struct ScaleCount {
    double epsilon = 0.0;
    double count = 0.0;
};

struct DimensionEstimate {
    double slope = 1.0;
    double stderr_slope = 0.0;
    std::vector<ScaleCount> scales;
};

namespace detail {

inline std::vector<double> dyadic_scales(double lo, double hi, std::size_t samples) {
    require(lo > 0.0 && hi > lo && hi <= 1.0, "box dimension: need 0 < scale_lo < scale_hi <= 1");
    require(lo >= 4.0 / static_cast<double>(samples), "box dimension: scale_lo below four grid spacings");
    std::vector<double> eps;
    for (int j = static_cast<int>(std::ceil(-std::log2(hi) - 1e-9)); std::ldexp(1.0, -j) >= lo * (1 - 1e-12); ++j)
        eps.push_back(std::ldexp(1.0, -j));
    require(eps.size() >= 2, "box dimension: window must span two dyadic scales");
    return eps;
}

}  // namespace detail

/// Box count N(eps) = sum over columns of width eps of (ceil(osc / eps) + 1),
/// regressed in log-log over the dyadic eps in [scale_lo, scale_hi].
inline DimensionEstimate box_dimension(std::span<const double> samples, double scale_lo = 1.0 / 256.0,
                                       double scale_hi = 1.0 / 8.0) {
    require(samples.size() >= (1u << 14), "box dimension: at least 2^14 samples required");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    // Rounding-level variation counts as constant.
    const double scale = std::max({1.0, std::fabs(*mn), std::fabs(*mx)});
    const double range = *mx - *mn > 1e-12 * scale ? *mx - *mn : 0.0;
    const auto eps = detail::dyadic_scales(scale_lo, scale_hi, samples.size());
    DimensionEstimate est;
    const double n = static_cast<double>(samples.size());
    std::vector<double> lx, ly;
    for (double e : eps) {
        double count = 0.0;
        const std::size_t columns = static_cast<std::size_t>(std::llround(1.0 / e));
        for (std::size_t col = 0; col < columns; ++col) {
            auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(col) * e * n));
            auto hi = std::min(samples.size() - 1, static_cast<std::size_t>(std::floor(static_cast<double>(col + 1) * e * n)));
            double cmin = samples[lo], cmax = samples[lo];
            for (std::size_t i = lo; i <= hi; ++i) {
                cmin = std::min(cmin, samples[i]);
                cmax = std::max(cmax, samples[i]);
            }
            const double osc = range > 0.0 ? (cmax - cmin) / range : 0.0;
            count += std::ceil(osc / e) + 1.0;
        }
        est.scales.push_back({e, count});
        lx.push_back(std::log(1.0 / e));
        ly.push_back(std::log(count));
    }
    if (range == 0.0) {
        est.slope = 1.0;
        est.stderr_slope = 0.0;
        return est;
    }
    auto fit = fit_line(lx, ly);
    est.slope = fit.slope;
    est.stderr_slope = fit.stderr_slope;
    return est;
}

struct ComplexDimension {
    DimensionEstimate real;
    DimensionEstimate imag;

    const DimensionEstimate& larger() const { return imag.slope > real.slope ? imag : real; }
};

inline ComplexDimension box_dimension(std::span<const Complex> values, double scale_lo = 1.0 / 256.0,
                                      double scale_hi = 1.0 / 8.0) {
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        re[i] = values[i].real();
        im[i] = values[i].imag();
    }
    return {box_dimension(re, scale_lo, scale_hi), box_dimension(im, scale_lo, scale_hi)};
}

struct HolderEstimate {
    double exponent = 1.0;
    double stderr_exponent = 0.0;
};

/// Slope of log sup_{|i-j|=h} |s_i - s_j| against log h over dyadic lags h
/// (as a fraction of the domain) in [scale_lo, scale_hi]. The default window
/// sits below the box-counting one: at large lags the increments saturate at
/// the range of the function and the slope flattens.
inline HolderEstimate holder_exponent(std::span<const double> samples, double scale_lo = 1.0 / 4096.0,
                                      double scale_hi = 1.0 / 64.0) {
    require(samples.size() >= (1u << 14), "holder exponent: at least 2^14 samples required");
    const auto eps = detail::dyadic_scales(scale_lo, scale_hi, samples.size());
    const double n = static_cast<double>(samples.size());
    std::vector<double> lx, ly;
    for (double e : eps) {
        const auto lag = static_cast<std::size_t>(std::llround(e * n));
        double sup = 0.0;
        for (std::size_t i = 0; i + lag < samples.size(); ++i) sup = std::max(sup, std::fabs(samples[i + lag] - samples[i]));
        if (sup <= 0.0) return {1.0, 0.0};
        lx.push_back(std::log(e));
        ly.push_back(std::log(sup));
    }
    auto fit = fit_line(lx, ly);
    return {fit.slope, fit.stderr_slope};
}

}  // namespace weylsum
