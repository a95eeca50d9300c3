#include "gencdf/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gencdf/errors.hpp"

namespace gencdf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string("parameter ") + name + " must be finite and > 0, got " + format_real(v));
    }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// t^{a-1} (1-t)^{b-1} in log space; +inf at an endpoint with a or b < 1.
double beta_kernel(double t, double a, double b, double log_norm) {
    if (t < 0.0 || t > 1.0) return 0.0;
    if ((t == 0.0 && a < 1.0) || (t == 1.0 && b < 1.0)) return kInf;
    if ((t == 0.0 && a > 1.0) || (t == 1.0 && b > 1.0)) return 0.0;
    const double la = a == 1.0 ? 0.0 : (a - 1.0) * std::log(t);
    const double lb = b == 1.0 ? 0.0 : (b - 1.0) * std::log1p(-t);
    return std::exp(la + lb - log_norm);
}

BaselineCdf::Parts unit_interval(std::string family, ParamList params) {
    BaselineCdf::Parts p;
    p.support_lo = ExtReal(0.0);
    p.support_hi = ExtReal(1.0);
    p.family = std::move(family);
    p.params = std::move(params);
    return p;
}

}  // namespace

BaselineCdf::BaselineCdf(Parts parts) : p_(std::make_shared<const Parts>(std::move(parts))) {}

double BaselineCdf::eval(double x) const {
    if (std::isnan(x)) throw DomainError("baseline evaluated at NaN");
    if (x == -kInf) return 0.0;
    if (x == kInf) return 1.0;
    if (p_->support_lo.is_finite() && x < p_->support_lo.raw()) return 0.0;
    if (p_->support_hi.is_finite() && x >= p_->support_hi.raw()) return 1.0;
    return clamp01(p_->cdf(x));
}

double BaselineCdf::density(double x) const {
    if (!p_->density) throw DomainError("baseline '" + p_->family + "' has no density");
    if (!std::isfinite(x)) return 0.0;
    return p_->density(x);
}

double BaselineCdf::param(const std::string& name) const {
    for (const auto& [k, v] : p_->params) {
        if (k == name) return v;
    }
    throw DomainError("baseline '" + p_->family + "' has no parameter '" + name + "'");
}

BaselineCdf make_uniform01() {
    auto p = unit_interval("uniform01", {});
    p.cdf = [](double x) { return x; };
    p.density = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_uniform(double lo, double hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw DomainError("uniform needs finite lo < hi");
    BaselineCdf::Parts p;
    p.support_lo = ExtReal(lo);
    p.support_hi = ExtReal(hi);
    p.family = "uniform";
    p.params = {{"lo", lo}, {"hi", hi}};
    p.cdf = [lo, hi](double x) { return (x - lo) / (hi - lo); };
    p.density = [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 / (hi - lo) : 0.0; };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_beta(double a, double b) {
    require_positive(a, "a");
    require_positive(b, "b");
    auto p = unit_interval("beta", {{"a", a}, {"b", b}});
    const double ln_b = numerics::log_beta(a, b);
    p.cdf = [a, b](double x) { return numerics::regularized_incomplete_beta(x, a, b); };
    p.density = [a, b, ln_b](double x) { return beta_kernel(x, a, b, ln_b); };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_power(double b) {
    require_positive(b, "b");
    auto p = unit_interval("power", {{"b", b}});
    p.cdf = [b](double x) { return std::pow(x, b); };
    p.density = [b](double x) {
        if (x < 0.0 || x > 1.0) return 0.0;
        if (x == 0.0) return b < 1.0 ? kInf : (b == 1.0 ? 1.0 : 0.0);
        return b * std::pow(x, b - 1.0);
    };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_kumaraswamy_kernel(double a, double b) {
    require_positive(a, "a");
    require_positive(b, "b");
    auto p = unit_interval("kumaraswamy", {{"a", a}, {"b", b}});
    p.cdf = [a, b](double x) { return -std::expm1(b * std::log1p(-std::pow(x, a))); };
    p.density = [a, b](double x) {
        if (x < 0.0 || x > 1.0) return 0.0;
        const double xa = std::pow(x, a);
        if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return kInf;
        if (x == 0.0) return a == 1.0 ? b : 0.0;
        if (x == 1.0) return b == 1.0 ? a : 0.0;
        return a * b * std::pow(x, a - 1.0) * std::pow(1.0 - xa, b - 1.0);
    };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_gamma(double shape, double rate) {
    require_positive(shape, "shape");
    require_positive(rate, "rate");
    BaselineCdf::Parts p;
    p.support_lo = ExtReal(0.0);
    p.support_hi = ExtReal::pos_infinity();
    p.family = "gamma";
    p.params = {{"shape", shape}, {"rate", rate}};
    p.cdf = [shape, rate](double x) { return numerics::regularized_lower_gamma(x, shape, rate); };
    const double log_norm = shape * std::log(rate) - std::lgamma(shape);
    p.density = [shape, rate, log_norm](double x) {
        if (x < 0.0) return 0.0;
        if (x == 0.0) return shape < 1.0 ? kInf : (shape == 1.0 ? rate : 0.0);
        return std::exp(log_norm + (shape - 1.0) * std::log(x) - rate * x);
    };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_exponential(double rate) {
    require_positive(rate, "rate");
    BaselineCdf::Parts p;
    p.support_lo = ExtReal(0.0);
    p.support_hi = ExtReal::pos_infinity();
    p.family = "exponential";
    p.params = {{"rate", rate}};
    p.cdf = [rate](double x) { return -std::expm1(-rate * x); };
    p.density = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_normal(double mean, double sd) {
    if (!std::isfinite(mean)) throw DomainError("normal mean must be finite");
    require_positive(sd, "sd");
    BaselineCdf::Parts p;
    p.support_lo = ExtReal::neg_infinity();
    p.support_hi = ExtReal::pos_infinity();
    p.family = "normal";
    p.params = {{"mean", mean}, {"sd", sd}};
    p.cdf = [mean, sd](double x) { return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0))); };
    p.density = [mean, sd](double x) {
        const double z = (x - mean) / sd;
        return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * 3.14159265358979323846));
    };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_beta3(double a, double b) {
    require_positive(a, "a");
    require_positive(b, "b");
    BaselineCdf::Parts p;
    p.kind = BaselineKind::DensityQuadrature;
    p.support_lo = ExtReal(0.0);
    p.support_hi = ExtReal::pos_infinity();
    p.family = "beta3";
    p.params = {{"a", a}, {"b", b}};
    p.cdf = [a, b](double x) { return numerics::regularized_incomplete_beta(x / (1.0 + x), a, b); };
    const double ln_b = numerics::log_beta(a, b);
    p.density = [a, b, ln_b](double x) {
        if (x < 0.0) return 0.0;
        if (x == 0.0) return a < 1.0 ? kInf : (a == 1.0 ? std::exp(-ln_b) : 0.0);
        return std::exp((a - 1.0) * std::log(x) - (a + b) * std::log1p(x) - ln_b);
    };
    // Total mass check. The tail (1, inf) maps onto (0, 1) by t -> 1/t,
    // where it becomes the same density with a and b exchanged; both
    // pieces then have at most an integrable singularity at 0.
    const double ln_b_copy = ln_b;
    auto swapped = [a, b, ln_b_copy](double s) {
        if (s <= 0.0) return b < 1.0 ? kInf : (b == 1.0 ? std::exp(-ln_b_copy) : 0.0);
        return std::exp((b - 1.0) * std::log(s) - (a + b) * std::log1p(s) - ln_b_copy);
    };
    double total = 0.0;
    double err = 0.0;
    for (const numerics::RealFunction& piece : {numerics::RealFunction(p.density), numerics::RealFunction(swapped)}) {
        try {
            const auto r = numerics::adaptive_quadrature(piece, 0.0, 1.0, 1e-11);
            total += r.value;
            err += r.error;
        } catch (const QuadratureError& e) {
            total += e.best_estimate();
            err += e.error_estimate();
        }
    }
    if (std::abs(total - 1.0) > 1e-8 + err) {
        throw DomainError("beta3 density does not integrate to 1 (got " + format_real(total) + ")");
    }
    return BaselineCdf(std::move(p));
}

BaselineCdf make_beta3_unit(double a, double b) {
    require_positive(a, "a");
    require_positive(b, "b");
    auto p = unit_interval("beta3_unit", {{"a", a}, {"b", b}});
    p.cdf = [a, b](double x) { return numerics::regularized_incomplete_beta(2.0 * x / (1.0 + x), a, b); };
    const double ln_b = numerics::log_beta(a, b);
    p.density = [a, b, ln_b](double x) {
        if (x < 0.0 || x > 1.0) return 0.0;
        const double k = beta_kernel(x, a, b, ln_b);
        if (std::isinf(k) || k == 0.0) return k;
        return k * std::exp(a * std::log(2.0) - (a + b) * std::log1p(x));
    };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_kummer_beta(double a, double b, double c, const numerics::Tolerances& tol) {
    require_positive(a, "a");
    require_positive(b, "b");
    if (!std::isfinite(c)) throw DomainError("parameter c must be finite");
    auto p = unit_interval("kummer_beta", {{"a", a}, {"b", b}, {"c", c}});
    p.kind = BaselineKind::DensityQuadrature;
    p.closed_form_cdf = false;
    const double ln_b = numerics::log_beta(a, b);
    auto raw = [a, b, c, ln_b](double t) {
        const double k = beta_kernel(t, a, b, ln_b);
        return k == 0.0 || std::isinf(k) ? k : k * std::exp(-c * t);
    };
    const auto norm = numerics::adaptive_quadrature(raw, 0.0, 1.0, tol.quadrature * 1e-2, tol.max_panels);
    const double scale = 1.0 / norm.value;
    auto dens = [raw, scale](double t) {
        const double v = raw(t);
        return std::isinf(v) ? v : v * scale;
    };
    p.density = dens;
    const double qtol = tol.quadrature;
    const int panels = tol.max_panels;
    p.cdf = [dens, qtol, panels](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        if (x <= 0.5) return numerics::adaptive_quadrature(dens, 0.0, x, qtol, panels).value;
        return 1.0 - numerics::adaptive_quadrature(dens, x, 1.0, qtol, panels).value;
    };
    return BaselineCdf(std::move(p));
}

BaselineCdf make_discrete_step(std::vector<Jump> jumps) {
    if (jumps.empty()) throw DomainError("discrete baseline needs at least one jump");
    double total = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        if (!std::isfinite(jumps[i].location)) throw DomainError("jump locations must be finite");
        if (!(jumps[i].mass > 0.0)) throw DomainError("jump masses must be > 0");
        if (i > 0 && !(jumps[i].location > jumps[i - 1].location)) {
            throw DomainError("jump locations must be strictly increasing");
        }
        total += jumps[i].mass;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("jump masses sum to " + format_real17(total) + ", not 1");

    std::vector<double> locations;
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& j : jumps) {
        acc += j.mass;
        locations.push_back(j.location);
        cumulative.push_back(acc);
    }
    cumulative.back() = 1.0;

    BaselineCdf::Parts p;
    p.kind = BaselineKind::DiscreteStep;
    p.support_lo = ExtReal(jumps.front().location);
    p.support_hi = ExtReal(jumps.back().location);
    p.support_convex = jumps.size() == 1;
    p.family = "discrete";
    p.cdf = [locations, cumulative](double x) {
        const auto it = std::upper_bound(locations.begin(), locations.end(), x);
        if (it == locations.begin()) return 0.0;
        return cumulative[static_cast<std::size_t>(it - locations.begin()) - 1];
    };
    p.jumps = std::move(jumps);
    return BaselineCdf(std::move(p));
}

namespace {

double lookup(const ParamList& params, const std::string& family, const std::string& name) {
    for (const auto& [k, v] : params) {
        if (k == name) return v;
    }
    throw DomainError("baseline '" + family + "' needs parameter '" + name + "'");
}

void expect_only(const ParamList& params, const std::string& family, std::initializer_list<const char*> names) {
    for (const auto& [k, v] : params) {
        if (std::none_of(names.begin(), names.end(), [&](const char* n) { return k == n; })) {
            throw DomainError("baseline '" + family + "' has no parameter '" + k + "'");
        }
    }
}

}  // namespace

std::vector<std::string> baseline_families() {
    return {"uniform01", "uniform", "beta",   "power",      "kumaraswamy", "gamma",   "exponential",
            "normal",    "beta3",   "beta3_unit", "kummer_beta", "discrete"};
}

BaselineCdf make_baseline(const std::string& family, const ParamList& params, const std::vector<Jump>& jumps) {
    auto get = [&](const char* name) { return lookup(params, family, name); };
    if (family != "discrete" && !jumps.empty()) throw DomainError("only discrete baselines take jumps");
    if (family == "uniform01") {
        expect_only(params, family, {});
        return make_uniform01();
    }
    if (family == "uniform") {
        expect_only(params, family, {"lo", "hi"});
        return make_uniform(get("lo"), get("hi"));
    }
    if (family == "beta") {
        expect_only(params, family, {"a", "b"});
        return make_beta(get("a"), get("b"));
    }
    if (family == "power") {
        expect_only(params, family, {"b"});
        return make_power(get("b"));
    }
    if (family == "kumaraswamy") {
        expect_only(params, family, {"a", "b"});
        return make_kumaraswamy_kernel(get("a"), get("b"));
    }
    if (family == "gamma") {
        expect_only(params, family, {"shape", "rate"});
        return make_gamma(get("shape"), get("rate"));
    }
    if (family == "exponential") {
        expect_only(params, family, {"rate"});
        return make_exponential(get("rate"));
    }
    if (family == "normal") {
        expect_only(params, family, {"mean", "sd"});
        return make_normal(get("mean"), get("sd"));
    }
    if (family == "beta3") {
        expect_only(params, family, {"a", "b"});
        return make_beta3(get("a"), get("b"));
    }
    if (family == "beta3_unit") {
        expect_only(params, family, {"a", "b"});
        return make_beta3_unit(get("a"), get("b"));
    }
    if (family == "kummer_beta") {
        expect_only(params, family, {"a", "b", "c"});
        return make_kummer_beta(get("a"), get("b"), get("c"));
    }
    if (family == "discrete") {
        expect_only(params, family, {});
        return make_discrete_step(jumps);
    }
    throw DomainError("unknown baseline family '" + family + "'");
}

double cdf_segment_mass(const BaselineCdf& f, ExtReal lo, ExtReal hi, const numerics::Tolerances& tol) {
    if (!(lo < hi)) return 0.0;
    if (f.has_closed_form_cdf() || !f.has_density()) return std::max(f.eval(hi) - f.eval(lo), 0.0);
    const ExtReal a = max(lo, f.support_lo());
    const ExtReal b = min(hi, f.support_hi());
    if (!(a < b)) return 0.0;
    if (a <= f.support_lo() && b >= f.support_hi()) return 1.0;
    const auto r = numerics::integrate([&f](double t) { return f.density(t); }, a, b, tol.quadrature, tol.max_panels);
    return std::max(r.value, 0.0);
}

double baseline_quantile(const BaselineCdf& f, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    if (f.is_discrete()) {
        double acc = 0.0;
        for (const auto& j : f.jumps()) {
            acc += j.mass;
            if (acc >= p - 1e-15) return j.location;
        }
        return f.jumps().back().location;
    }
    if (p == 0.0) return f.support_lo().is_finite() ? f.support_lo().raw() : -kInf;
    if (p == 1.0 && !f.support_hi().is_finite()) return kInf;
    double lo = f.support_lo().is_finite() ? f.support_lo().raw() : -1.0;
    double hi = f.support_hi().is_finite() ? f.support_hi().raw() : 1.0;
    for (int i = 0; i < 2000 && f.eval(lo) > p; ++i) lo = lo * 2.0 - 1.0;
    for (int i = 0; i < 2000 && f.eval(hi) < p; ++i) hi = hi * 2.0 + 1.0;
    const double width = std::max(1.0, hi - lo);
    return numerics::bracketed_root([&f](double x) { return f.eval(x); }, p, lo, hi, 1e-14 * width);
}

}  // namespace gencdf
