#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <regex>
#include <string>

#include "weylsum/core.hpp"

namespace weylsum {

using HighReal = boost::multiprecision::cpp_bin_float_50;

/// A real number parsed from text, kept at 50 significant digits.
struct PreciseReal {
    HighReal value = 0;
    std::string text = "0";

    double to_double() const { return static_cast<double>(value); }

    DD to_dd() const {
        double hi = static_cast<double>(value);
        double lo = static_cast<double>(value - HighReal(hi));
        return quick_two_sum(hi, lo);
    }
};

inline HighReal high_pi() { return boost::math::constants::pi<HighReal>(); }

/// Accepts sqrt2, golden ((sqrt5 - 1)/2), e, pi-frac:p/q (fractional part of
/// pi p/q), a ratio p/q, or a decimal literal, each optionally signed.
inline PreciseReal parse_real(const std::string& raw) {
    std::string s = raw;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    require(!s.empty(), "real: empty input");
    PreciseReal out;
    out.text = s;
    bool negate = false;
    std::string body = s;
    if (body[0] == '-' || body[0] == '+') {
        negate = body[0] == '-';
        body = body.substr(1);
    }
    static const std::regex ratio(R"(^(\d+)/(\d+)$)");
    static const std::regex decimal(R"(^(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$)");
    std::smatch m;
    if (body == "sqrt2") {
        out.value = boost::multiprecision::sqrt(HighReal(2));
    } else if (body == "golden") {
        out.value = (boost::multiprecision::sqrt(HighReal(5)) - 1) / 2;
    } else if (body == "e") {
        out.value = boost::multiprecision::exp(HighReal(1));
    } else if (body.rfind("pi-frac:", 0) == 0) {
        std::string frac_part = body.substr(8);
        require(std::regex_match(frac_part, m, ratio), "real: pi-frac expects p/q");
        HighReal den(m[2].str());
        require(den != 0, "real: zero denominator");
        HighReal v = high_pi() * HighReal(m[1].str()) / den;
        out.value = v - boost::multiprecision::floor(v);
    } else if (std::regex_match(body, m, ratio)) {
        HighReal den(m[2].str());
        require(den != 0, "real: zero denominator");
        out.value = HighReal(m[1].str()) / den;
    } else if (std::regex_match(body, decimal)) {
        out.value = HighReal(body);
    } else {
        throw ValidationError("real: cannot parse '" + raw + "'");
    }
    if (negate) out.value = -out.value;
    return out;
}

inline PreciseReal precise_from_double(double x) {
    PreciseReal r;
    r.value = HighReal(x);
    r.text = std::to_string(x);
    return r;
}

}  // namespace weylsum
