// Large values of the diagonal sum f(alpha, alpha + gamma; Q) built from
// continued-fraction convergents of gamma.
#include <cstdio>

#include "weylsum.hpp"

int main() {
    using namespace weylsum;
    const auto gamma = parse_real("sqrt2");
    for (const auto& cv : continued_fraction(gamma, 8))
        std::printf("convergent %lld/%lld  error %.3e\n", static_cast<long long>(cv.c), static_cast<long long>(cv.q), cv.err);

    for (int k : {2, 3}) {
        const auto w = lower_bound_witness(gamma, k, 0.05, 100);
        std::printf("k=%d q=%lld a_k=%lld Q=%.1f |f|=%.2f predicted %.2f\n", k, static_cast<long long>(w.q),
                    static_cast<long long>(w.a_k), w.Q, w.f_abs, w.predicted);
    }

    std::vector<double> Qs;
    for (int e = 8; e <= 14; ++e) Qs.push_back(std::ldexp(1.0, e));
    const auto th = theta_regression(gamma, 2, Qs, ThetaMode::Witness);
    std::printf("exponent estimate %.3f +- %.3f\n", th.slope, th.stderr_slope);
}
