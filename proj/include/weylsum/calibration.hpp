#pragma once

namespace weylsum {

/// Empirical constants standing in for implied constants. Diagnostics report
/// these alongside every measured ratio.
struct Calibration {
    double main_term_C = 10.0;       // |f - main term| against its error shape
    double main_term_eps = 0.05;     // exponent slack on q^{1/2}
    double complete_sum_C = 4.0;     // |S_{1,3}(q; b, a)| kappa(q) / q^{1+eps}
    double cubic_sup_C = 8.0;        // cubic sup bound
    double integral_C = 4.0;         // |I| |beta1| / (1 + Q^k |betak|)^{1/2}
    double second_derivative_c = 2.0;  // |I| (|betak| Q^{k-2})^{1/2}
    double find_a3_threshold = 0.3;  // |S| >= t q^{1/2 - eps}
    double witness_floor = 0.05;     // |f| >= w Q^{3/4 - 2 delta}
};

inline const Calibration& default_calibration() {
    static const Calibration c{};
    return c;
}

}  // namespace weylsum
