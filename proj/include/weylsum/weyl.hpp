#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "weylsum/core.hpp"
#include "weylsum/number_theory.hpp"

namespace weylsum {

/// Sum over 1 <= n <= P.
struct FullRange {
    double P = 1.0;
};

/// Sum over Q < n <= 2Q.
struct DyadicRange {
    double Q = 1.0;
};

using SumRange = std::variant<FullRange, DyadicRange>;

/// Inclusive index bounds [first, last]; empty when first > last.
struct IndexBounds {
    u64 first = 1;
    u64 last = 0;

    u64 count() const { return last >= first ? last - first + 1 : 0; }
};

inline IndexBounds index_bounds(const SumRange& range) {
    if (const auto* full = std::get_if<FullRange>(&range)) {
        require(full->P > 0, "range: P must be positive");
        return {1, static_cast<u64>(std::floor(full->P))};
    }
    const auto& dy = std::get<DyadicRange>(range);
    require(dy.Q > 0, "range: Q must be positive");
    return {static_cast<u64>(std::floor(dy.Q)) + 1, static_cast<u64>(std::floor(2.0 * dy.Q))};
}

/// Integration interval matching a summation range: [0, P] or [Q, 2Q].
inline std::pair<double, double> integration_bounds(const SumRange& range) {
    if (const auto* full = std::get_if<FullRange>(&range)) return {0.0, full->P};
    const auto& dy = std::get<DyadicRange>(range);
    return {dy.Q, 2.0 * dy.Q};
}

struct WeylTerm {
    int degree = 1;
    DD alpha;
};

struct WeylArgs {
    std::vector<WeylTerm> terms;
    SumRange range = FullRange{1.0};

    void validate() const {
        require(!terms.empty(), "weyl sum: at least one coefficient required");
        std::set<int> seen;
        for (const auto& t : terms) {
            require(t.degree >= 1, "weyl sum: degrees must be positive");
            require(seen.insert(t.degree).second, "weyl sum: degrees must be pairwise distinct");
        }
        (void)index_bounds(range);
    }
};

namespace detail {
inline constexpr u64 kWeylChunk = 1u << 15;
}

/// sum_n e(sum_j alpha_j n^{k_j}) over the range. Each alpha_j n^{k_j} is
/// reduced modulo one in double-double before the exponential; partial sums
/// over fixed-size chunks are combined in index order.
inline Complex weyl_sum(const WeylArgs& args) {
    args.validate();
    const IndexBounds bounds = index_bounds(args.range);
    const u64 count = bounds.count();
    if (count == 0) return {0.0, 0.0};
    int max_degree = 1;
    for (const auto& t : args.terms) max_degree = std::max(max_degree, t.degree);
    require(nt::checked_pow(bounds.last, max_degree).has_value(), "weyl sum: n^k exceeds 64 bits");

    const u64 chunks = (count + detail::kWeylChunk - 1) / detail::kWeylChunk;
    std::vector<CompensatedComplex> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        u64 lo = bounds.first + c * detail::kWeylChunk;
        u64 hi = std::min(bounds.last, lo + detail::kWeylChunk - 1);
        CompensatedComplex acc;
        for (u64 n = lo; n <= hi; ++n) {
            DD phase;
            for (const auto& t : args.terms) phase = phase + mul_mod1(t.alpha, *nt::checked_pow(n, t.degree));
            acc.add(unit_phase(phase));
        }
        partial[c] = acc;
    });
    CompensatedComplex total;
    for (const auto& p : partial) total.merge(p);
    return total.value();
}

/// f_{1,k}(alpha1, alphak) over a range.
inline Complex weyl_sum_binomial(DD alpha1, DD alphak, int k, const SumRange& range) {
    require(k >= 2, "binomial weyl sum: k must be at least 2");
    return weyl_sum({{{1, alpha1}, {k, alphak}}, range});
}

/// Number of dyadic blocks (P/2^i, P/2^{i-1}] needed to reach n = 1: the
/// smallest I with P / 2^I < 1.
inline int dyadic_block_count(double P) {
    int blocks = 0;
    double lower = P;
    while (lower >= 1.0) {
        lower *= 0.5;
        ++blocks;
    }
    return blocks;
}

/// Full-range sum assembled from dyadic pieces f(.; P/2^i).
inline Complex dyadic_assemble(DD alpha1, DD alphak, int k, double P) {
    require(P >= 1.0, "dyadic assembly: P must be at least 1");
    CompensatedComplex acc;
    const int blocks = dyadic_block_count(P);
    double Q = P;
    for (int i = 1; i <= blocks; ++i) {
        Q *= 0.5;
        acc.add(weyl_sum_binomial(alpha1, alphak, k, DyadicRange{Q}));
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// Evaluation of f(alpha) = sum_t w_t e(offset_t + alpha m_t) on a uniform
// alpha grid. Each block restarts from exactly reduced phases and advances
// by multiplying with the per-term step rotation.
// ---------------------------------------------------------------------------

struct GridTerm {
    u64 multiplier = 0;
    DD offset;
    Complex weight{1.0, 0.0};
};

struct UniformGrid {
    DD start;
    DD step;
    std::size_t count = 0;

    DD at(std::size_t j) const { return start + step * static_cast<double>(j); }
};

namespace detail {

inline constexpr std::size_t kGridBlock = 512;
inline constexpr std::size_t kLanes = 4;

inline void evaluate_grid_block(std::span<const GridTerm> terms, const UniformGrid& grid, std::size_t first,
                                std::size_t len, std::span<Complex> out) {
    const std::size_t padded = (terms.size() + kLanes - 1) / kLanes * kLanes;
    std::vector<double> zr(padded, 0.0), zi(padded, 0.0), rr(padded, 0.0), ri(padded, 0.0);
    const DD alpha0 = grid.at(first);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        Complex z = terms[t].weight * unit_phase(terms[t].offset + mul_mod1(alpha0, terms[t].multiplier));
        Complex r = unit_phase(mul_mod1(grid.step, terms[t].multiplier));
        zr[t] = z.real();
        zi[t] = z.imag();
        rr[t] = r.real();
        ri[t] = r.imag();
    }
    for (std::size_t j = 0; j < len; ++j) {
        double sr[kLanes] = {}, cr[kLanes] = {}, si[kLanes] = {}, ci[kLanes] = {};
        for (std::size_t t = 0; t < padded; t += kLanes) {
            for (std::size_t l = 0; l < kLanes; ++l) {
                const double vr = zr[t + l], vi = zi[t + l];
                double y = vr - cr[l];
                double s = sr[l] + y;
                cr[l] = (s - sr[l]) - y;
                sr[l] = s;
                y = vi - ci[l];
                s = si[l] + y;
                ci[l] = (s - si[l]) - y;
                si[l] = s;
                zr[t + l] = vr * rr[t + l] - vi * ri[t + l];
                zi[t + l] = vr * ri[t + l] + vi * rr[t + l];
            }
        }
        CompensatedComplex acc;
        for (std::size_t l = 0; l < kLanes; ++l) {
            acc.add({sr[l], si[l]});
            acc.add({-cr[l], -ci[l]});
        }
        out[j] = acc.value();
    }
}

template <typename BlockFn>
void for_each_grid_block(std::span<const GridTerm> terms, const UniformGrid& grid, BlockFn&& fn) {
    const std::size_t blocks = (grid.count + kGridBlock - 1) / kGridBlock;
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t first = b * kGridBlock;
        const std::size_t len = std::min(kGridBlock, grid.count - first);
        std::vector<Complex> values(len);
        evaluate_grid_block(terms, grid, first, len, values);
        fn(b, first, std::span<const Complex>(values));
    });
}

}  // namespace detail

inline std::vector<Complex> evaluate_on_grid(std::span<const GridTerm> terms, const UniformGrid& grid) {
    std::vector<Complex> out(grid.count);
    detail::for_each_grid_block(terms, grid, [&](std::size_t, std::size_t first, std::span<const Complex> v) {
        std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(first));
    });
    return out;
}

inline std::vector<double> magnitudes_on_grid(std::span<const GridTerm> terms, const UniformGrid& grid) {
    std::vector<double> out(grid.count);
    detail::for_each_grid_block(terms, grid, [&](std::size_t, std::size_t first, std::span<const Complex> v) {
        for (std::size_t j = 0; j < v.size(); ++j) out[first + j] = std::abs(v[j]);
    });
    return out;
}

/// (1/count) sum_j |f(alpha_j)|^2.
inline double mean_square_on_grid(std::span<const GridTerm> terms, const UniformGrid& grid) {
    const std::size_t blocks = (grid.count + detail::kGridBlock - 1) / detail::kGridBlock;
    std::vector<CompensatedSum<double>> partial(blocks);
    detail::for_each_grid_block(terms, grid, [&](std::size_t b, std::size_t, std::span<const Complex> v) {
        CompensatedSum<double> acc;
        for (const auto& z : v) acc.add(std::norm(z));
        partial[b] = acc;
    });
    CompensatedSum<double> total;
    for (const auto& p : partial) total.merge(p);
    return total.value() / static_cast<double>(grid.count);
}

/// Terms of f_{1,k}(alpha, alpha + gamma; range) viewed as a function of alpha:
/// multiplier n + n^k, offset gamma n^k.
inline std::vector<GridTerm> binomial_diagonal_terms(DD gamma, int k, const SumRange& range) {
    const IndexBounds b = index_bounds(range);
    require(b.count() == 0 || nt::checked_pow(b.last, k).has_value(), "n^k exceeds 64 bits");
    std::vector<GridTerm> terms;
    terms.reserve(b.count());
    for (u64 n = b.first; n <= b.last; ++n) {
        u64 nk = *nt::checked_pow(n, k);
        terms.push_back({n + nk, mul_mod1(gamma, nk), {1.0, 0.0}});
    }
    return terms;
}

// ---------------------------------------------------------------------------
// Second-moment diagnostics.
// ---------------------------------------------------------------------------

struct ParsevalResult {
    double numeric = 0.0;
    i64 exact = 0;
    std::size_t grid = 0;
    u64 max_frequency = 0;
    bool aliasing_free = true;
    std::vector<std::string> warnings;

    double relative_error() const {
        return exact == 0 ? std::fabs(numeric) : std::fabs(numeric - static_cast<double>(exact)) / static_cast<double>(exact);
    }
};

/// Largest |frequency| of |f_{1,k}(alpha, alpha+gamma; Q)|^2 as a polynomial in e(alpha).
inline u64 parseval_max_frequency(int k, double Q) {
    const IndexBounds b = index_bounds(DyadicRange{Q});
    if (b.count() < 2) return 0;
    return (b.last + *nt::checked_pow(b.last, k)) - (b.first + *nt::checked_pow(b.first, k));
}

/// Smallest aliasing-free uniform grid, floored at 10^5 points.
inline std::size_t parseval_default_grid(int k, double Q) {
    return std::max<std::size_t>(100000, static_cast<std::size_t>(parseval_max_frequency(k, Q)) + 1);
}

/// Riemann sum of int_0^1 |f_{1,k}(alpha, alpha+gamma; Q)|^2 d alpha against
/// the exact count floor(2Q) - floor(Q). grid = 0 selects the default grid.
inline ParsevalResult second_moment_parseval(int k, DD gamma, double Q, std::size_t grid = 0) {
    require(k >= 2, "parseval: k must be at least 2");
    require(Q >= 1.0, "parseval: Q must be at least 1");
    ParsevalResult res;
    res.max_frequency = parseval_max_frequency(k, Q);
    res.grid = grid == 0 ? parseval_default_grid(k, Q) : grid;
    require(static_cast<double>(res.grid) >= 4.0 * Q * k, "parseval: grid must be at least 4 Q k");
    res.aliasing_free = res.grid > res.max_frequency;
    if (!res.aliasing_free)
        res.warnings.push_back("grid of " + std::to_string(res.grid) + " points is below the aliasing-free size " +
                               std::to_string(res.max_frequency + 1));
    res.exact = static_cast<i64>(std::floor(2.0 * Q)) - static_cast<i64>(std::floor(Q));
    const auto terms = binomial_diagonal_terms(gamma, k, DyadicRange{Q});
    UniformGrid g{DD(0.0), dd_ratio(1.0, static_cast<double>(res.grid)), res.grid};
    res.numeric = mean_square_on_grid(terms, g);
    return res;
}

struct MinorArcResult {
    double major = 0.0;
    i64 total = 0;
    double minor = 0.0;
    double ratio = 0.0;  // major / P
    double R = 0.0;
    double Q = 0.0;
    std::size_t arcs = 0;
    bool overlapping = false;
    std::vector<std::string> warnings;
};

namespace detail {

// Pairs (m, n) with m > n and h = m^k - n^k > 0.
inline std::vector<u64> power_differences(u64 N, int k) {
    std::vector<u64> powers(N + 1);
    for (u64 n = 1; n <= N; ++n) powers[n] = *nt::checked_pow(n, k);
    std::vector<u64> diffs;
    diffs.reserve(N * (N - 1) / 2);
    for (u64 m = 2; m <= N; ++m)
        for (u64 n = 1; n < m; ++n) diffs.push_back(powers[m] - powers[n]);
    return diffs;
}

// int_lo^hi |f_k|^2 = N (hi - lo) + 2 sum_{m>n} (sin 2 pi h hi - sin 2 pi h lo) / (2 pi h).
inline double power_sum_square_integral(std::span<const u64> diffs, u64 N, double lo, double hi) {
    CompensatedSum<double> acc;
    acc.add(static_cast<double>(N) * (hi - lo));
    for (u64 h : diffs) {
        const double hd = static_cast<double>(h);
        const DD a = mul_mod1(DD(lo), h), b = mul_mod1(DD(hi), h);
        acc.add(2.0 * (std::sin(kTwoPi * b.value()) - std::sin(kTwoPi * a.value())) / (kTwoPi * hd));
    }
    return acc.value();
}

}  // namespace detail

/// Major-arc part of int |f_k(alpha)|^2 with f_k = sum_{n<=P} e(alpha n^k), arcs
/// |alpha - a/q| <= 1/(qQ) for q <= R = P^{1+phi}, Q = P^{k-1-psi}.
///
/// Disjoint arcs are integrated in closed form through Ramanujan sums:
/// summing e(ah/q) over reduced a gives c_q(h), so each q costs one pass over
/// the differences h = m^k - n^k. Overlapping arcs are merged and integrated
/// interval by interval instead.
inline MinorArcResult minor_arc_second_moment(int k, double P, double phi, double psi) {
    require(k >= 2, "minor arc moment: k must be at least 2");
    require(P >= 2.0, "minor arc moment: P must be at least 2");
    require(phi > 0.0 && phi < psi, "minor arc moment: need 0 < phi < psi");
    MinorArcResult res;
    res.R = std::pow(P, 1.0 + phi);
    res.Q = std::pow(P, static_cast<double>(k) - 1.0 - psi);
    require(res.R * res.Q < std::pow(P, k), "minor arc moment: arcs overlap grossly (R Q >= P^k)");
    const u64 N = static_cast<u64>(std::floor(P));
    const u64 Rint = static_cast<u64>(std::floor(res.R));
    res.total = static_cast<i64>(N);
    for (u64 q = 1; q <= Rint; ++q) res.arcs += nt::euler_phi(q);

    // Farey neighbours in F_R have q + q' <= 2R - 1; arcs meet once Q < q + q'.
    const double widest_pair = Rint >= 2 ? static_cast<double>(2 * Rint - 1) : 2.0;
    res.overlapping = res.Q < widest_pair;
    const auto diffs = detail::power_differences(N, k);

    if (!res.overlapping) {
        std::vector<double> per_q(Rint + 1, 0.0);
        parallel_for(Rint, [&](std::size_t idx) {
            const u64 q = idx + 1;
            const double w = 1.0 / (static_cast<double>(q) * res.Q);
            std::vector<std::pair<u64, i64>> weights;  // d, mu(q/d) d
            for (u64 d : nt::divisors(q)) {
                int mu = nt::moebius(q / d);
                if (mu != 0) weights.push_back({d, mu * static_cast<i64>(d)});
            }
            CompensatedSum<double> acc;
            acc.add(static_cast<double>(nt::euler_phi(q)) * 2.0 * w * static_cast<double>(N));
            for (u64 h : diffs) {
                i64 c = 0;
                for (const auto& [d, wt] : weights)
                    if (h % d == 0) c += wt;
                if (c == 0) continue;
                const double hd = static_cast<double>(h);
                const double s = std::sin(kTwoPi * mul_mod1(DD(w), h).value());
                acc.add(2.0 * static_cast<double>(c) * s / (std::numbers::pi * hd));
            }
            per_q[q] = acc.value();
        });
        CompensatedSum<double> major;
        for (u64 q = 1; q <= Rint; ++q) major.add(per_q[q]);
        res.major = major.value();
    } else {
        res.warnings.push_back("major arcs overlap; merged before integration");
        std::vector<std::pair<double, double>> arcs;
        for (u64 q = 1; q <= Rint; ++q) {
            const double w = 1.0 / (static_cast<double>(q) * res.Q);
            for (u64 a = 1; a <= q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                const double c = static_cast<double>(a) / static_cast<double>(q);
                arcs.push_back({c - w, c + w});
            }
        }
        std::sort(arcs.begin(), arcs.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& iv : arcs) {
            if (!merged.empty() && iv.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }
        // The union can wrap past one full period only if it covers everything.
        if (merged.back().second - merged.front().first >= 1.0) {
            double span_total = 0.0;
            for (const auto& iv : merged) span_total += iv.second - iv.first;
            if (span_total >= 1.0) {
                res.warnings.push_back("major arcs cover the whole period");
                res.major = static_cast<double>(N);
                res.minor = 0.0;
                res.ratio = res.major / P;
                return res;
            }
        }
        std::vector<double> parts(merged.size());
        parallel_for(merged.size(), [&](std::size_t i) {
            parts[i] = detail::power_sum_square_integral(diffs, N, merged[i].first, merged[i].second);
        });
        CompensatedSum<double> major;
        for (double v : parts) major.add(v);
        res.major = major.value();
    }
    res.minor = static_cast<double>(res.total) - res.major;
    res.ratio = res.major / P;
    return res;
}

}  // namespace weylsum
