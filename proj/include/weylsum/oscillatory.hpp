#pragma once

#include <array>
#include <vector>

#include "weylsum/core.hpp"

namespace weylsum {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
};

/// I(beta1, betak; A) = int_A e(beta1 x + betak x^k) dx over a finite union A
/// of disjoint intervals in [0, inf).
struct IntegralArgs {
    double beta1 = 0.0;
    double betak = 0.0;
    int k = 2;
    std::vector<Interval> intervals;

    void validate() const {
        require(k >= 2, "integral: k must be at least 2");
        require(!intervals.empty(), "integral: at least one interval required");
        std::vector<Interval> sorted = intervals;
        std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            require(std::isfinite(sorted[i].lo) && std::isfinite(sorted[i].hi), "integral: bounds must be finite");
            require(sorted[i].lo >= 0.0 && sorted[i].lo < sorted[i].hi, "integral: need 0 <= lo < hi");
            if (i > 0) require(sorted[i - 1].hi <= sorted[i].lo, "integral: intervals must be disjoint");
        }
    }

    double total_length() const {
        double s = 0.0;
        for (const auto& iv : intervals) s += iv.length();
        return s;
    }

    double phase(double x) const { return beta1 * x + betak * std::pow(x, k); }
    double derivative(double x) const { return beta1 + k * betak * std::pow(x, k - 1); }
};

/// int_lo^hi e(beta1 x) dx = e(beta1 (lo+hi)/2) sin(pi beta1 L) / (pi beta1).
inline Complex integral_linear(double beta1, double lo, double hi) {
    const double L = hi - lo;
    const double arg = std::numbers::pi * beta1 * L;
    double amplitude;
    if (std::fabs(arg) < 1e-8)
        amplitude = L * (1.0 - arg * arg / 6.0);
    else
        amplitude = std::sin(arg) / (std::numbers::pi * beta1);
    // Centre phase reduced in double-double so large beta1 * mid stays accurate.
    DD centre = two_prod(beta1, 0.5 * (lo + hi));
    return amplitude * unit_phase(centre);
}

namespace detail {

// Gauss-Kronrod 15/7 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    Complex value;
    double error = 0.0;
};

template <typename F>
PanelResult gauss_kronrod15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const Complex fc = f(c);
    Complex kronrod = fc * kWgk[7];
    Complex gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const Complex s = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

inline constexpr std::size_t kMaxBisections = 1000000;
inline constexpr std::size_t kMaxPanels = 4000000;

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of e(beta1 x + betak x^k) over each
/// interval. Initial panels span at most a quarter period of the local
/// frequency |beta1 + k betak x^{k-1}|; panels are then bisected until the
/// accumulated error estimate is at most 1e-9 (1 + total length).
inline Complex integral_quad(const IntegralArgs& args) {
    args.validate();
    const double tol = 1e-9 * (1.0 + args.total_length());
    auto f = [&](double x) { return unit_phase(two_prod(args.betak, std::pow(x, args.k)) + two_prod(args.beta1, x)); };

    std::vector<Interval> panels;
    for (const auto& iv : args.intervals) {
        double x = iv.lo;
        while (x < iv.hi) {
            double fa = std::fabs(args.derivative(x));
            double w = iv.hi - x;
            // |phi'| is monotone on [0, inf) so its panel maximum sits at an end.
            for (int it = 0; it < 64; ++it) {
                double fmax = std::max(fa, std::fabs(args.derivative(std::min(iv.hi, x + w))));
                double cap = fmax > 0.0 ? 0.25 / fmax : w;
                if (cap >= w) break;
                w = cap;
            }
            double next = std::min(iv.hi, x + w);
            if (next <= x) throw NumericalFailure("integral: panel width underflow");
            panels.push_back({x, next});
            if (panels.size() > detail::kMaxPanels)
                throw NumericalFailure("integral: oscillation too fast for quadrature");
            x = next;
        }
    }

    const double total = args.total_length();
    std::vector<Complex> values(panels.size());
    std::vector<std::size_t> bisections(panels.size(), 0);
    parallel_for(panels.size(), [&](std::size_t i) {
        CompensatedComplex acc;
        std::vector<Interval> stack{panels[i]};
        std::size_t splits = 0;
        while (!stack.empty()) {
            Interval cur = stack.back();
            stack.pop_back();
            auto r = detail::gauss_kronrod15(f, cur.lo, cur.hi);
            double local_tol = tol * cur.length() / total;
            if (r.error <= local_tol || cur.length() < 1e-12 * (1.0 + cur.hi)) {
                acc.add(r.value);
                continue;
            }
            if (++splits > detail::kMaxBisections) break;
            double mid = 0.5 * (cur.lo + cur.hi);
            stack.push_back({mid, cur.hi});
            stack.push_back({cur.lo, mid});
        }
        values[i] = acc.value();
        bisections[i] = splits;
    });
    std::size_t splits = 0;
    for (auto s : bisections) splits += s;
    if (splits > detail::kMaxBisections) throw NumericalFailure("integral: subdivision limit exceeded");

    CompensatedComplex total_sum;
    for (const auto& v : values) total_sum.add(v);
    return total_sum.value();
}

/// Closed form when betak = 0, quadrature otherwise.
inline Complex integral(const IntegralArgs& args) {
    args.validate();
    if (args.betak != 0.0) return integral_quad(args);
    CompensatedComplex acc;
    for (const auto& iv : args.intervals) acc.add(integral_linear(args.beta1, iv.lo, iv.hi));
    return acc.value();
}

/// tau = min over A of |beta1 + k betak x^{k-1}|; zero when the derivative
/// changes sign inside some interval.
inline double derivative_floor(const IntegralArgs& args) {
    args.validate();
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& iv : args.intervals) {
        double a = args.derivative(iv.lo), b = args.derivative(iv.hi);
        if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) return 0.0;
        tau = std::min({tau, std::fabs(a), std::fabs(b)});
    }
    return tau;
}

/// First-derivative test bound: each interval contributes at most 1/(pi tau).
inline double first_derivative_bound(const IntegralArgs& args) {
    double tau = derivative_floor(args);
    if (tau == 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(args.intervals.size()) / (std::numbers::pi * tau);
}

}  // namespace weylsum
