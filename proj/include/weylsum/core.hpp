#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace weylsum {

using Complex = std::complex<double>;
using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when arguments violate an operation's preconditions.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot reach its accuracy target.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

// ---------------------------------------------------------------------------
// Double-double arithmetic. Only what phase reduction needs: exact products,
// compensated sums, and reduction modulo one.
// ---------------------------------------------------------------------------

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD operator+(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    DD t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, double b) {
    DD p = two_prod(a.hi, b);
    p.lo = std::fma(a.lo, b, p.lo);
    return quick_two_sum(p.hi, p.lo);
}

inline DD operator*(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

/// num/den to double-double accuracy. Both must be exactly representable.
inline DD dd_ratio(double num, double den) {
    double hi = num / den;
    double rem = std::fma(-hi, den, num);
    return quick_two_sum(hi, rem / den);
}

inline DD dd_ratio(i64 num, i64 den) {
    const double kExact = 9007199254740992.0;  // 2^53
    if (std::fabs(static_cast<double>(num)) < kExact && std::fabs(static_cast<double>(den)) < kExact)
        return dd_ratio(static_cast<double>(num), static_cast<double>(den));
    // Split the numerator; den is assumed below 2^53 in every caller.
    i64 q = num / den;
    i64 r = num % den;
    return DD(static_cast<double>(q)) + dd_ratio(static_cast<double>(r), static_cast<double>(den));
}

/// Fractional part in [0, 1).
inline DD frac(DD x) {
    double f = std::floor(x.hi);
    DD y = quick_two_sum(x.hi - f, x.lo);
    if (y.hi < 0.0 || (y.hi == 0.0 && y.lo < 0.0)) y = y + DD(1.0);
    if (y.hi >= 1.0) y = y - DD(1.0);
    if (y.hi < 0.0) y = DD(0.0);
    return y;
}

/// frac(alpha * m) for an exact unsigned integer m.
///
/// The product is split into exact double pieces (alpha.hi and alpha.lo
/// against the high and low 32-bit halves of m); each piece's fractional part
/// is exact, so the only rounding left is in the final short sum.
inline DD mul_mod1(DD alpha, u64 m) {
    const double two32 = 4294967296.0;
    double mh = static_cast<double>(m >> 32);
    double ml = static_cast<double>(m & 0xffffffffULL);

    auto piece = [](double x) { return x - std::floor(x); };

    DD acc;
    DD p1 = two_prod(alpha.hi, mh);
    acc = acc + DD(piece(p1.hi * two32)) + DD(piece(p1.lo * two32));
    DD p2 = two_prod(alpha.hi, ml);
    acc = acc + DD(piece(p2.hi)) + DD(piece(p2.lo));
    DD p3 = two_prod(alpha.lo, mh);
    acc = acc + DD(piece(p3.hi * two32)) + DD(piece(p3.lo * two32));
    DD p4 = two_prod(alpha.lo, ml);
    acc = acc + DD(piece(p4.hi)) + DD(piece(p4.lo));
    return frac(acc);
}

/// e(t) = exp(2 pi i t), with t reduced modulo one first.
inline Complex unit_phase(double turns) {
    double t = turns - std::round(turns);
    double ang = kTwoPi * t;
    return {std::cos(ang), std::sin(ang)};
}

inline Complex unit_phase(DD turns) {
    DD t = frac(turns);
    double v = t.hi + t.lo;
    if (v >= 0.5) v -= 1.0;
    double ang = kTwoPi * v;
    return {std::cos(ang), std::sin(ang)};
}

/// e(r / q) for an exact residue r.
inline Complex root_of_unity(i64 r, i64 q) {
    r %= q;
    if (r < 0) r += q;
    if (2 * r > q) r -= q;
    double ang = kTwoPi * (static_cast<double>(r) / static_cast<double>(q));
    return {std::cos(ang), std::sin(ang)};
}

// ---------------------------------------------------------------------------
// Compensated summation (Neumaier's variant of Kahan).
// ---------------------------------------------------------------------------

template <typename Real>
struct CompensatedSum {
    Real sum{0};
    Real comp{0};

    void add(Real v) {
        Real t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    void merge(const CompensatedSum& other) {
        add(other.sum);
        add(other.comp);
    }

    Real value() const { return sum + comp; }
};

struct CompensatedComplex {
    CompensatedSum<double> re;
    CompensatedSum<double> im;

    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }

    void merge(const CompensatedComplex& other) {
        re.merge(other.re);
        im.merge(other.im);
    }

    Complex value() const { return {re.value(), im.value()}; }
};

// ---------------------------------------------------------------------------
// Worker pool sizing and deterministic parallel map.
// ---------------------------------------------------------------------------

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}

// Set on pool threads so nested parallel_for calls run inline.
inline thread_local bool in_worker = false;
}  // namespace detail

/// Caps the number of worker threads; 0 restores the default.
inline void set_thread_limit(unsigned n) { detail::thread_cap().store(n); }

inline unsigned worker_count() {
    unsigned cap = detail::thread_cap().load();
    if (cap > 0) return cap;
    if (const char* env = std::getenv("WEYL_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs body(i) for i in [0, n). Tasks write into caller-owned slots, so the
/// result never depends on scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    unsigned workers = detail::in_worker ? 1 : static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            detail::in_worker = true;
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(n);
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Least squares line fit, used by every exponent regression.
// ---------------------------------------------------------------------------

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0, "line fit needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = y[i] - (fit.intercept + fit.slope * x[i]);
            rss += r * r;
        }
        fit.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

/// SplitMix64 step, used to derive independent per-task seeds.
inline u64 mix_seed(u64 seed, u64 stream) {
    u64 z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace weylsum
