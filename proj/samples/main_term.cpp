// Weyl sum near a rational point against its extended main term.
#include <cstdio>

#include "weylsum.hpp"

int main() {
    using namespace weylsum;
    const MultiApprox ma{12, 2, 5, 1e-4, 2e-10, 3};
    ma.validate();
    for (double P : {500.0, 1000.0, 2000.0}) {
        const FullRange range{P};
        const Complex f = weyl_sum_of(ma, range);
        const Complex m = main_term(ma, range);
        const auto r = delta_residual(ma, range);
        std::printf("P=%6.0f |f|=%10.4f |main|=%10.4f |f-main|=%8.4f  |classical delta|=%8.4f  reconciled to %.1e\n", P,
                    std::abs(f), std::abs(m), std::abs(r.direct), std::abs(delta_classical(ma, range)), r.discrepancy);
    }
    for (const auto& t : dagger_terms(ma.q, ma.a1))
        std::printf("divisor %llu: numerator %lld%s\n", static_cast<unsigned long long>(t.d), static_cast<long long>(t.numerator),
                    t.leading ? " (leading)" : "");
}
