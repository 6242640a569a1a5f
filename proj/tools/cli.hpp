#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <variant>

#include "weylsum.hpp"

namespace weylsum::cli {

using Json = nlohmann::ordered_json;
using Cell = std::variant<i64, u64, double, std::string, bool>;

/// Tabular result of one run plus its configuration and diagnostics.
struct Report {
    Json config = Json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    Json diagnostics = Json::object();
    std::vector<std::string> warnings;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct GlobalOptions {
    u64 seed = 1;
    int precision = 12;
    std::string format = "csv";
    std::string out;
    unsigned threads = 0;
};

inline std::string format_double(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    std::string s = os.str();
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string cell_text(const Cell& c, int precision) {
    return std::visit(
        [&](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v, precision);
            else if constexpr (std::is_same_v<T, std::string>)
                return v;
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else
                return std::to_string(v);
        },
        c);
}

inline Json cell_json(const Cell& c, int precision) {
    return std::visit(
        [&](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return format_double(v, precision);
                return std::stod(format_double(v, precision));
            } else {
                return v;
            }
        },
        c);
}

inline void write_csv(const Report& r, std::ostream& os, int precision) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << csv_escape(r.columns[i]);
    os << "\r\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i], precision));
        os << "\r\n";
    }
}

inline void write_json(const Report& r, std::ostream& os, int precision) {
    Json doc;
    doc["config"] = r.config;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[r.columns[i]] = cell_json(row[i], precision);
        rows.push_back(obj);
    }
    doc["rows"] = rows;
    Json diag = r.diagnostics;
    for (auto it = diag.begin(); it != diag.end(); ++it)
        if (it->is_number_float()) *it = std::stod(format_double(it->get<double>(), precision));
    diag["warnings"] = r.warnings;
    doc["diagnostics"] = diag;
    os << doc.dump(2) << "\n";
}

inline Json calibration_json(const Calibration& c) {
    return Json{{"main_term_C", c.main_term_C},
                {"main_term_eps", c.main_term_eps},
                {"complete_sum_C", c.complete_sum_C},
                {"cubic_sup_C", c.cubic_sup_C},
                {"integral_C", c.integral_C},
                {"second_derivative_c", c.second_derivative_c},
                {"find_a3_threshold", c.find_a3_threshold},
                {"witness_floor", c.witness_floor}};
}

inline Rational parse_rational(const std::string& s) {
    Rational r;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            r.num = std::stoll(s);
            r.den = 1;
        } else {
            r.num = std::stoll(s.substr(0, slash));
            r.den = std::stoll(s.substr(slash + 1));
        }
    } catch (const std::exception&) {
        throw ValidationError("cannot parse rational '" + s + "'");
    }
    require(r.den > 0, "rational denominator must be positive");
    return r;
}

/// "a..b" gives the scales 2^a, ..., 2^b; otherwise a comma-separated list.
inline std::vector<double> parse_scales(const std::string& s) {
    std::vector<double> out;
    auto dots = s.find("..");
    try {
        if (dots != std::string::npos) {
            int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
            require(a <= b && b - a <= 60, "scale range must be increasing");
            for (int e = a; e <= b; ++e) out.push_back(std::ldexp(1.0, e));
        } else {
            std::stringstream ss(s);
            std::string tok;
            while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("cannot parse scales '" + s + "'");
    }
    return out;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_real(tok).to_double());
    return out;
}

inline Interval parse_interval(const std::string& s) {
    auto comma = s.find(',');
    require(comma != std::string::npos, "interval must be lo,hi");
    return {parse_real(s.substr(0, comma)).to_double(), parse_real(s.substr(comma + 1)).to_double()};
}

// ---------------------------------------------------------------------------
// Per-subcommand parameter records.
// ---------------------------------------------------------------------------

struct CsumParams {
    u64 q = 1;
    i64 a1 = 0, ak = 0;
    int k = 3;
    std::string method = "crt";
};

struct RangeParams {
    double P = 0.0;
    double Q = 0.0;

    SumRange range() const {
        require((P > 0) != (Q > 0), "give exactly one of --P or --Q");
        return P > 0 ? SumRange{FullRange{P}} : SumRange{DyadicRange{Q}};
    }
    double length_scale() const { return P > 0 ? P : 2 * Q; }
};

struct WeylParams {
    int k = 3;
    std::string alpha1 = "0", alphak = "0";
    RangeParams range;
    bool dyadic = false;
};

struct IntegralParams {
    int k = 3;
    std::string beta1 = "0", betak = "0";
    std::vector<std::string> intervals;
    std::string method = "auto";
};

struct MainTermParams {
    u64 q = 1;
    i64 a1 = 0, ak = 1;
    int k = 3;
    std::string beta1 = "0", betak = "0";
    RangeParams range;
    bool terms = false;
};

struct ScanParams {
    int k = 3;
    u64 qmax = 500;
    double Pmin = 100, Pmax = 5000;
    std::size_t samples = 300;
    bool unrestricted = false;
    double betak_scale = 8.0;
};

struct DioParams {
    std::string mode = "cf";
    std::string gamma = "sqrt2";
    int n = 20;
    i64 qmin = 1;
    double Qbound = 10;
    u64 q = 1;
    double delta = 0.2;
    u64 Qmax = 100000;
};

struct WitnessParams {
    std::string gamma = "sqrt2";
    int k = 2;
    double delta = 0.05;
    i64 qmin = 100;
    double Q = 0;
};

struct SupParams {
    std::string gamma = "sqrt2";
    int k = 2;
    double Q = 64;
    std::size_t coarse = 0;
    bool allow_coarse = false;
    int refine = 40;
    std::vector<std::string> seeds;
};

struct ThetaParams {
    std::string gamma = "sqrt2";
    int k = 2;
    std::string mode = "witness";
    std::string scales = "8..16";
    double delta = 0.02;
    i64 qmin = 1;
    std::size_t coarse = 0;
    bool allow_coarse = false;
    int refine = 40;
};

struct FractalParams {
    int k = 2;
    std::string r = "1";
    std::string c = "random";
    int draws = 1;
    int N = 4096;
    std::size_t samples = 1u << 15;
    std::string data = "indicator";
    std::string breakpoints, values;
    double scale_lo = 1.0 / 256.0, scale_hi = 1.0 / 8.0;
    std::string emit = "dimension";
};

struct MomentParams {
    std::string mode = "parseval";
    int k = 3;
    std::string gamma = "sqrt2";
    double Q = 50;
    std::size_t grid = 0;
    double P = 200, phi = 0.1, psi = 0.3;
};

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

inline Report run_csum(const CsumParams& p) {
    Report r;
    r.config = {{"q", p.q}, {"a1", p.a1}, {"ak", p.ak}, {"k", p.k}, {"method", p.method}};
    Complex z;
    if (p.method == "direct")
        z = complete_sum_direct({p.q, p.a1, p.ak, p.k});
    else if (p.method == "crt")
        z = complete_sum_crt({p.q, p.a1, p.ak, p.k});
    else if (p.method == "p2") {
        require(p.k == 3, "p2 method needs k = 3");
        u64 root = static_cast<u64>(std::llround(std::sqrt(static_cast<double>(p.q))));
        require(root * root == p.q, "p2 method needs q = p^2");
        z = complete_sum_prime_square_cubic(root, p.a1, p.ak);
    } else
        throw ValidationError("unknown method '" + p.method + "'");
    r.columns = {"q", "a1", "ak", "k", "re", "im", "abs"};
    r.add({p.q, p.a1, p.ak, static_cast<i64>(p.k), z.real(), z.imag(), std::abs(z)});
    return r;
}

inline Report run_weyl(const WeylParams& p) {
    Report r;
    const auto a1 = parse_real(p.alpha1), ak = parse_real(p.alphak);
    r.config = {{"k", p.k}, {"alpha1", a1.text}, {"alphak", ak.text}, {"P", p.range.P}, {"Q", p.range.Q},
                {"dyadic_assemble", p.dyadic}};
    Complex z;
    u64 terms = 0;
    if (p.dyadic) {
        require(p.range.P > 0, "--dyadic needs --P");
        z = dyadic_assemble(a1.to_dd(), ak.to_dd(), p.k, p.range.P);
        terms = index_bounds(FullRange{p.range.P}).count();
        r.diagnostics["blocks"] = dyadic_block_count(p.range.P);
    } else {
        const auto range = p.range.range();
        z = weyl_sum_binomial(a1.to_dd(), ak.to_dd(), p.k, range);
        terms = index_bounds(range).count();
    }
    r.columns = {"terms", "re", "im", "abs"};
    r.add({terms, z.real(), z.imag(), std::abs(z)});
    return r;
}

inline Report run_integral(const IntegralParams& p) {
    Report r;
    IntegralArgs args;
    args.k = p.k;
    args.beta1 = parse_real(p.beta1).to_double();
    args.betak = parse_real(p.betak).to_double();
    for (const auto& s : p.intervals) args.intervals.push_back(parse_interval(s));
    r.config = {{"k", p.k}, {"beta1", p.beta1}, {"betak", p.betak}, {"intervals", p.intervals}, {"method", p.method}};
    args.validate();
    Complex z;
    if (p.method == "quad")
        z = integral_quad(args);
    else if (p.method == "linear") {
        require(args.betak == 0.0, "linear method needs betak = 0");
        z = integral(args);
    } else if (p.method == "auto")
        z = integral(args);
    else
        throw ValidationError("unknown method '" + p.method + "'");
    const double tau = derivative_floor(args);
    r.columns = {"re", "im", "abs", "tau", "first_derivative_bound"};
    r.add({z.real(), z.imag(), std::abs(z), tau, first_derivative_bound(args)});
    return r;
}

inline MultiApprox make_approx(u64 q, i64 a1, i64 ak, int k, const std::string& b1, const std::string& bk) {
    MultiApprox ma{q, a1, ak, parse_real(b1).to_double(), parse_real(bk).to_double(), k};
    ma.validate();
    return ma;
}

inline Report run_main_term(const MainTermParams& p) {
    Report r;
    const auto ma = make_approx(p.q, p.a1, p.ak, p.k, p.beta1, p.betak);
    const auto range = p.range.range();
    const double P = p.range.length_scale();
    r.config = {{"q", p.q}, {"a1", p.a1}, {"ak", p.ak}, {"k", p.k}, {"beta1", p.beta1}, {"betak", p.betak},
                {"P", p.range.P}, {"Q", p.range.Q}};
    const Complex f = weyl_sum_of(ma, range);
    const Complex m = main_term(ma, range);
    const auto resid = delta_residual(ma, range);
    const Complex classical = delta_classical(ma, range);
    const auto& cal = default_calibration();
    const double shape = main_term_error_shape(ma, P, cal.main_term_eps);
    r.diagnostics["calibration"] = calibration_json(cal);
    r.diagnostics["small_betak"] = satisfies_small_betak(ma, P);
    r.diagnostics["residual_discrepancy"] = resid.discrepancy;
    if (p.terms) {
        r.columns = {"d", "e", "numerator", "center_num", "center_den", "leading", "s_re", "s_im", "i_re", "i_im"};
        for (const auto& t : dagger_terms(ma.q, ma.a1)) {
            const Complex s = complete_sum(ma.q, t.numerator, ma.ak, ma.k);
            const Complex i = detail::range_integral(detail::shifted_beta(ma, t.numerator), ma.betak, ma.k, range);
            r.add({t.d, t.e, t.numerator, t.e, t.center_den, t.leading, s.real(), s.imag(), i.real(), i.imag()});
        }
        return r;
    }
    r.columns = {"f_re", "f_im", "main_re", "main_im", "delta_abs", "classical_abs", "shape", "ratio"};
    r.add({f.real(), f.imag(), m.real(), m.imag(), std::abs(resid.direct), std::abs(classical), shape,
           std::abs(resid.direct) / shape});
    return r;
}

inline Report run_delta_scan(const ScanParams& p, u64 seed) {
    Report r;
    DeltaScanConfig cfg;
    cfg.k = p.k;
    cfg.qmax = p.qmax;
    cfg.Pmin = p.Pmin;
    cfg.Pmax = p.Pmax;
    cfg.samples = p.samples;
    cfg.small_betak = !p.unrestricted;
    cfg.betak_scale = p.betak_scale;
    cfg.seed = seed;
    cfg.eps = default_calibration().main_term_eps;
    r.config = {{"k", p.k}, {"qmax", p.qmax}, {"Pmin", p.Pmin}, {"Pmax", p.Pmax}, {"samples", p.samples},
                {"unrestricted", p.unrestricted}, {"betak_scale", p.betak_scale}};
    const auto rows = delta_scan(cfg);
    r.columns = {"q", "a1", "ak", "beta1", "betak", "P", "f_abs", "main_abs", "delta_abs", "ratio", "small_betak"};
    double worst = 0.0;
    for (const auto& row : rows) {
        r.add({row.ma.q, row.ma.a1, row.ma.ak, row.ma.beta1, row.ma.betak, row.P, row.f_abs, row.main_abs,
               row.delta_abs, row.ratio, row.small_betak});
        worst = std::max(worst, row.ratio);
    }
    r.diagnostics["max_ratio"] = worst;
    r.diagnostics["calibration"] = calibration_json(default_calibration());
    return r;
}

inline Report run_dio(const DioParams& p) {
    Report r;
    const auto g = parse_real(p.gamma);
    r.config = {{"mode", p.mode}, {"gamma", g.text}};
    if (p.mode == "cf") {
        r.config["n"] = p.n;
        r.columns = {"index", "c", "q", "err"};
        auto cf = continued_fraction(g, p.n);
        for (std::size_t i = 0; i < cf.size(); ++i) r.add({static_cast<u64>(i), cf[i].c, cf[i].q, cf[i].err});
        r.diagnostics["produced"] = cf.size();
    } else if (p.mode == "odd") {
        r.config["qmin"] = p.qmin;
        auto cv = odd_convergent(g.value, p.qmin);
        r.columns = {"c", "q", "err"};
        r.add({cv.c, cv.q, cv.err});
    } else if (p.mode == "dirichlet") {
        r.config["Qbound"] = p.Qbound;
        auto d = dirichlet_approx(g.value, p.Qbound);
        r.columns = {"a", "q", "beta"};
        r.add({d.a, d.q, d.beta});
    } else if (p.mode == "kappa") {
        r.config = {{"mode", p.mode}, {"q", p.q}};
        auto kf = kappa_factor(p.q);
        r.columns = {"q", "q2", "q3", "kappa"};
        r.add({p.q, kf.q2, kf.q3, kf.kappa});
    } else if (p.mode == "gamma0") {
        r.config["delta"] = p.delta;
        r.config["Qmax"] = p.Qmax;
        auto v = gamma0_violations(g.value, p.delta, p.Qmax);
        r.columns = {"q", "c"};
        for (const auto& x : v) r.add({x.q, x.c});
        r.diagnostics["count"] = v.size();
    } else if (p.mode == "khinchine") {
        r.config["Qmax"] = p.Qmax;
        auto m = khinchine_minimum(g.value, p.Qmax);
        r.columns = {"q", "min_value"};
        r.add({m.q, m.value});
    } else {
        throw ValidationError("unknown dio mode '" + p.mode + "'");
    }
    return r;
}

inline std::vector<std::string> witness_columns() {
    return {"gamma", "k", "q", "c", "a_k", "a_1", "delta", "Q", "alpha", "beta1", "f_abs", "predicted", "s_abs", "ratio",
            "passed"};
}

inline std::vector<Cell> witness_row(const WitnessReport& w) {
    return {w.gamma, static_cast<i64>(w.k), w.q, w.c, w.a_k, w.a_1, w.delta, w.Q, frac(w.alpha).value(), w.beta1, w.f_abs,
            w.predicted, w.s_abs, w.ratio, w.passed};
}

inline Report run_witness(const WitnessParams& p, u64 seed) {
    Report r;
    const auto g = parse_real(p.gamma);
    r.config = {{"gamma", g.text}, {"k", p.k}, {"delta", p.delta}, {"qmin", p.qmin}, {"Q", p.Q}};
    const double floor = default_calibration().witness_floor;
    const auto w = p.Q > 0 ? witness_at_scale(g, p.k, p.delta, p.Q, seed, floor, p.qmin)
                           : lower_bound_witness(g, p.k, p.delta, p.qmin, seed);
    r.columns = witness_columns();
    r.add(witness_row(w));
    r.diagnostics["calibration"] = calibration_json(default_calibration());
    return r;
}

inline SupSearchOptions sup_options(std::size_t coarse, bool allow, int refine) {
    SupSearchOptions o;
    o.coarse = coarse;
    o.allow_coarse = allow;
    o.refine_iters = refine;
    return o;
}

inline Report run_sup(const SupParams& p) {
    Report r;
    const auto g = parse_real(p.gamma);
    r.config = {{"gamma", g.text}, {"k", p.k}, {"Q", p.Q}, {"coarse", p.coarse}, {"allow_coarse", p.allow_coarse},
                {"refine", p.refine}, {"seeds", p.seeds}};
    auto opt = sup_options(p.coarse, p.allow_coarse, p.refine);
    for (const auto& s : p.seeds) opt.seeds.push_back(parse_real(s).to_dd());
    auto res = sup_search(g, p.k, p.Q, opt);
    r.warnings = res.warnings;
    r.columns = {"alpha_star", "value", "grid"};
    r.add({res.alpha_star, res.value, static_cast<u64>(res.grid)});
    return r;
}

inline Report run_theta(const ThetaParams& p, u64 seed) {
    Report r;
    const auto g = parse_real(p.gamma);
    r.config = {{"gamma", g.text}, {"k", p.k}, {"mode", p.mode}, {"scales", p.scales}, {"delta", p.delta},
                {"qmin", p.qmin}};
    ThetaOptions opt;
    opt.delta = p.delta;
    opt.seed = seed;
    opt.qmin = p.qmin;
    opt.grid = sup_options(p.coarse, p.allow_coarse, p.refine);
    ThetaMode mode;
    if (p.mode == "witness")
        mode = ThetaMode::Witness;
    else if (p.mode == "grid")
        mode = ThetaMode::Grid;
    else
        throw ValidationError("unknown theta mode '" + p.mode + "'");
    auto res = theta_regression(g, p.k, parse_scales(p.scales), mode, opt);
    r.warnings = res.warnings;
    r.columns = {"Q", "estimate", "q", "c", "a_k", "alpha", "slope", "stderr"};
    for (const auto& pt : res.points) r.add({pt.Q, pt.estimate, pt.q, pt.c, pt.a_k, pt.alpha, res.slope, res.stderr_slope});
    r.diagnostics["slope"] = res.slope;
    r.diagnostics["stderr"] = res.stderr_slope;
    return r;
}

inline StepFunction fractal_data(const FractalParams& p) {
    if (p.data == "indicator") return StepFunction::indicator(0.0, std::numbers::pi);
    require(p.data == "custom", "unknown data '" + p.data + "'");
    StepFunction g{parse_list(p.breakpoints), parse_list(p.values)};
    g.validate();
    return g;
}

inline Report run_fractal(const FractalParams& p, u64 seed) {
    Report r;
    const Rational rr = parse_rational(p.r);
    require(p.draws >= 1, "--draws must be positive");
    r.config = {{"k", p.k}, {"r", p.r}, {"c", p.c}, {"draws", p.draws}, {"N", p.N}, {"samples", p.samples},
                {"data", p.data}, {"scale_lo", p.scale_lo}, {"scale_hi", p.scale_hi}, {"emit", p.emit}};
    const StepFunction g = fractal_data(p);
    const auto coeffs = fourier_coeffs(g, p.N);
    std::vector<HighReal> cs;
    std::vector<std::string> labels;
    if (p.c == "random") {
        for (int d = 0; d < p.draws; ++d) {
            std::mt19937_64 rng(mix_seed(seed, static_cast<u64>(d)));
            double c = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
            cs.push_back(HighReal(c));
            labels.push_back(format_double(c, 17));
        }
    } else {
        auto c = parse_real(p.c);
        cs.push_back(c.value);
        labels.push_back(c.text);
    }
    if (p.emit == "samples") {
        require(cs.size() == 1, "sample output needs a single c");
        auto o = evolve_restrict(coeffs, g.mean_square(), p.k, rr, cs[0], p.samples);
        r.columns = {"x", "re", "im"};
        for (std::size_t j = 0; j < o.xs.size(); ++j) r.add({o.xs[j], o.values[j].real(), o.values[j].imag()});
        r.diagnostics["truncation_l2"] = o.truncation_l2;
        return r;
    }
    if (p.emit == "scales")
        r.columns = {"c", "part", "epsilon", "count"};
    else if (p.emit == "dimension")
        r.columns = {"c", "dim_re", "dim_im", "dim_max", "stderr", "holder_re", "holder_im", "truncation_l2"};
    else
        throw ValidationError("unknown emit '" + p.emit + "'");
    for (std::size_t d = 0; d < cs.size(); ++d) {
        auto o = evolve_restrict(coeffs, g.mean_square(), p.k, rr, cs[d], p.samples);
        auto dim = box_dimension(o.values, p.scale_lo, p.scale_hi);
        if (p.emit == "scales") {
            for (const auto& sc : dim.real.scales) r.add({labels[d], std::string("re"), sc.epsilon, sc.count});
            for (const auto& sc : dim.imag.scales) r.add({labels[d], std::string("im"), sc.epsilon, sc.count});
            continue;
        }
        std::vector<double> re(o.values.size()), im(o.values.size());
        for (std::size_t j = 0; j < re.size(); ++j) {
            re[j] = o.values[j].real();
            im[j] = o.values[j].imag();
        }
        r.add({labels[d], dim.real.slope, dim.imag.slope, dim.larger().slope, dim.larger().stderr_slope,
               holder_exponent(re).exponent, holder_exponent(im).exponent, o.truncation_l2});
    }
    return r;
}

inline Report run_moment(const MomentParams& p) {
    Report r;
    if (p.mode == "parseval") {
        const auto g = parse_real(p.gamma);
        r.config = {{"mode", p.mode}, {"k", p.k}, {"gamma", g.text}, {"Q", p.Q}, {"grid", p.grid}};
        auto res = second_moment_parseval(p.k, g.to_dd(), p.Q, p.grid);
        r.warnings = res.warnings;
        r.columns = {"numeric", "exact", "grid", "max_frequency", "relative_error"};
        r.add({res.numeric, res.exact, static_cast<u64>(res.grid), res.max_frequency, res.relative_error()});
    } else if (p.mode == "minor") {
        r.config = {{"mode", p.mode}, {"k", p.k}, {"P", p.P}, {"phi", p.phi}, {"psi", p.psi}};
        auto res = minor_arc_second_moment(p.k, p.P, p.phi, p.psi);
        r.warnings = res.warnings;
        r.columns = {"major", "total", "minor", "ratio", "R", "Q", "arcs", "overlapping"};
        r.add({res.major, res.total, res.minor, res.ratio, res.R, res.Q, static_cast<u64>(res.arcs), res.overlapping});
    } else {
        throw ValidationError("unknown moment mode '" + p.mode + "'");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------------

inline void add_range(CLI::App* sub, RangeParams& rp) {
    sub->add_option("--P", rp.P, "full range 1 <= n <= P");
    sub->add_option("--Q", rp.Q, "dyadic range Q < n <= 2Q");
}

/// Parses argv, runs one subcommand and writes its report. Returns the exit
/// code: 0 on success, 2 on invalid input, 3 on numerical failure.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weyl sums, complete sums and their main terms"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--seed", g.seed, "seed for every randomised step");
    app.add_option("--precision", g.precision, "decimal places for floats")->check(CLI::Range(0, 17));
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "write to this path instead of stdout");
    app.add_option("--threads", g.threads, "worker thread cap (default: WEYL_THREADS or hardware)");

    CsumParams csum;
    auto* c_csum = app.add_subcommand("csum", "complete exponential sum S(q; a1, ak)");
    c_csum->add_option("--q", csum.q)->required();
    c_csum->add_option("--a1", csum.a1);
    c_csum->add_option("--ak", csum.ak);
    c_csum->add_option("--k", csum.k);
    c_csum->add_option("--method", csum.method, "direct, crt or p2");

    WeylParams weyl;
    auto* c_weyl = app.add_subcommand("weyl", "binomial Weyl sum");
    c_weyl->add_option("--k", weyl.k);
    c_weyl->add_option("--alpha1", weyl.alpha1);
    c_weyl->add_option("--alphak", weyl.alphak);
    add_range(c_weyl, weyl.range);
    c_weyl->add_flag("--dyadic", weyl.dyadic, "assemble the full range from dyadic blocks");

    IntegralParams integ;
    auto* c_int = app.add_subcommand("integral", "oscillatory integral of e(beta1 x + betak x^k)");
    c_int->add_option("--k", integ.k);
    c_int->add_option("--beta1", integ.beta1);
    c_int->add_option("--betak", integ.betak);
    c_int->add_option("--interval", integ.intervals, "lo,hi (repeatable)")->required();
    c_int->add_option("--method", integ.method, "auto, linear or quad");

    MainTermParams mt;
    auto* c_mt = app.add_subcommand("main-term", "extended main term and its error");
    c_mt->add_option("--q", mt.q)->required();
    c_mt->add_option("--a1", mt.a1);
    c_mt->add_option("--ak", mt.ak);
    c_mt->add_option("--k", mt.k);
    c_mt->add_option("--beta1", mt.beta1);
    c_mt->add_option("--betak", mt.betak);
    add_range(c_mt, mt.range);
    c_mt->add_flag("--terms", mt.terms, "list the divisor terms instead of the summary");

    ScanParams scan;
    auto* c_scan = app.add_subcommand("delta-scan", "randomised main-term error scan");
    c_scan->add_option("--k", scan.k);
    c_scan->add_option("--qmax", scan.qmax);
    c_scan->add_option("--Pmin", scan.Pmin);
    c_scan->add_option("--Pmax", scan.Pmax);
    c_scan->add_option("--samples", scan.samples);
    c_scan->add_flag("--unrestricted", scan.unrestricted, "draw betak beyond the small-betak range");
    c_scan->add_option("--betak-scale", scan.betak_scale);

    DioParams dio;
    auto* c_dio = app.add_subcommand("dio", "continued fractions and approximation diagnostics");
    c_dio->add_option("--mode", dio.mode, "cf, odd, dirichlet, kappa, gamma0 or khinchine");
    c_dio->add_option("--gamma", dio.gamma);
    c_dio->add_option("--n", dio.n);
    c_dio->add_option("--qmin", dio.qmin);
    c_dio->add_option("--Qbound", dio.Qbound);
    c_dio->add_option("--q", dio.q);
    c_dio->add_option("--delta", dio.delta);
    c_dio->add_option("--Qmax", dio.Qmax);

    WitnessParams wit;
    auto* c_wit = app.add_subcommand("witness", "lower-bound witness for the diagonal sum");
    c_wit->add_option("--gamma", wit.gamma);
    c_wit->add_option("--k", wit.k);
    c_wit->add_option("--delta", wit.delta);
    c_wit->add_option("--qmin", wit.qmin);
    c_wit->add_option("--Q", wit.Q, "evaluate the best witness at this scale");

    SupParams sup;
    auto* c_sup = app.add_subcommand("sup-search", "grid search for the sup over alpha");
    c_sup->add_option("--gamma", sup.gamma);
    c_sup->add_option("--k", sup.k);
    c_sup->add_option("--Q", sup.Q);
    c_sup->add_option("--coarse", sup.coarse);
    c_sup->add_flag("--allow-coarse", sup.allow_coarse);
    c_sup->add_option("--refine", sup.refine);
    c_sup->add_option("--seed-alpha", sup.seeds, "extra refinement centre (repeatable)");

    ThetaParams th;
    auto* c_th = app.add_subcommand("theta", "exponent regression over scales");
    c_th->add_option("--gamma", th.gamma);
    c_th->add_option("--k", th.k);
    c_th->add_option("--mode", th.mode, "witness or grid");
    c_th->add_option("--scales", th.scales, "a..b for 2^a..2^b, or a list");
    c_th->add_option("--delta", th.delta);
    c_th->add_option("--qmin", th.qmin, "witness mode: smallest convergent denominator");
    c_th->add_option("--coarse", th.coarse);
    c_th->add_flag("--allow-coarse", th.allow_coarse);
    c_th->add_option("--refine", th.refine);

    FractalParams fr;
    auto* c_fr = app.add_subcommand("fractal", "oblique restriction and graph dimension");
    c_fr->add_option("--k", fr.k);
    c_fr->add_option("--r", fr.r, "rational slope u/v");
    c_fr->add_option("--c", fr.c, "offset, or 'random'");
    c_fr->add_option("--draws", fr.draws);
    c_fr->add_option("--N", fr.N);
    c_fr->add_option("--samples", fr.samples);
    c_fr->add_option("--data", fr.data, "indicator or custom");
    c_fr->add_option("--breakpoints", fr.breakpoints);
    c_fr->add_option("--values", fr.values);
    c_fr->add_option("--scale-lo", fr.scale_lo);
    c_fr->add_option("--scale-hi", fr.scale_hi);
    c_fr->add_option("--emit", fr.emit, "dimension, scales or samples");

    MomentParams mo;
    auto* c_mo = app.add_subcommand("moment", "second-moment diagnostics");
    c_mo->add_option("--mode", mo.mode, "parseval or minor");
    c_mo->add_option("--k", mo.k);
    c_mo->add_option("--gamma", mo.gamma);
    c_mo->add_option("--Q", mo.Q);
    c_mo->add_option("--grid", mo.grid);
    c_mo->add_option("--P", mo.P);
    c_mo->add_option("--phi", mo.phi);
    c_mo->add_option("--psi", mo.psi);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        set_thread_limit(g.threads);
        Report rep;
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "csum") rep = run_csum(csum);
        else if (cmd == "weyl") rep = run_weyl(weyl);
        else if (cmd == "integral") rep = run_integral(integ);
        else if (cmd == "main-term") rep = run_main_term(mt);
        else if (cmd == "delta-scan") rep = run_delta_scan(scan, g.seed);
        else if (cmd == "dio") rep = run_dio(dio);
        else if (cmd == "witness") rep = run_witness(wit, g.seed);
        else if (cmd == "sup-search") rep = run_sup(sup);
        else if (cmd == "theta") rep = run_theta(th, g.seed);
        else if (cmd == "fractal") rep = run_fractal(fr, g.seed);
        else rep = run_moment(mo);

        Json cfg = {{"command", cmd}, {"seed", g.seed}, {"precision", g.precision}, {"format", g.format}};
        for (auto& [key, value] : rep.config.items()) cfg[key] = value;
        rep.config = cfg;

        std::ofstream file;
        std::ostream* sink = &out;
        if (!g.out.empty()) {
            file.open(g.out, std::ios::binary);
            require(file.good(), "cannot open output file '" + g.out + "'");
            sink = &file;
        }
        if (g.format == "json") {
            write_json(rep, *sink, g.precision);
        } else {
            write_csv(rep, *sink, g.precision);
            for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
        }
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace weylsum::cli
