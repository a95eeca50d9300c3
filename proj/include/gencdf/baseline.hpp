#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gencdf/ext_real.hpp"
#include "gencdf/numerics.hpp"

namespace gencdf {

enum class BaselineKind { ClosedForm, DensityQuadrature, DiscreteStep };

struct Jump {
    double location;
    double mass;
};

using ParamList = std::vector<std::pair<std::string, double>>;

/// A univariate CDF used either as the integrand measure F or as one of
/// the composed baselines G_i. Cheap to copy; immutable.
class BaselineCdf {
public:
    struct Parts {
        BaselineKind kind = BaselineKind::ClosedForm;
        std::function<double(double)> cdf;      // finite x only
        std::function<double(double)> density;  // empty when there is none
        bool closed_form_cdf = true;             // cdf is not itself a quadrature
        std::vector<Jump> jumps;
        ExtReal support_lo;
        ExtReal support_hi;
        bool support_convex = true;
        std::string family;
        ParamList params;
    };

    explicit BaselineCdf(Parts parts);

    BaselineKind kind() const { return p_->kind; }
    bool is_discrete() const { return p_->kind == BaselineKind::DiscreteStep; }

    /// F(x); F(-inf) = 0 and F(+inf) = 1.
    double eval(double x) const;
    double eval(ExtReal x) const { return eval(x.raw()); }

    bool has_density() const { return static_cast<bool>(p_->density); }
    double density(double x) const;
    bool has_closed_form_cdf() const { return p_->closed_form_cdf; }

    const std::vector<Jump>& jumps() const { return p_->jumps; }
    ExtReal support_lo() const { return p_->support_lo; }
    ExtReal support_hi() const { return p_->support_hi; }
    bool support_convex() const { return p_->support_convex; }

    const std::string& family() const { return p_->family; }
    const ParamList& params() const { return p_->params; }
    double param(const std::string& name) const;

private:
    std::shared_ptr<const Parts> p_;
};

BaselineCdf make_uniform01();
BaselineCdf make_uniform(double lo, double hi);
BaselineCdf make_beta(double a, double b);
BaselineCdf make_power(double b);
BaselineCdf make_kumaraswamy_kernel(double a, double b);
BaselineCdf make_gamma(double shape, double rate);
BaselineCdf make_exponential(double rate);
BaselineCdf make_normal(double mean, double sd);
/// Beta prime law on [0, inf): density t^{a-1} (1+t)^{-(a+b)} / B(a, b).
BaselineCdf make_beta3(double a, double b);
/// Libby-Novick beta on (0, 1) with lambda = 2:
/// density 2^a t^{a-1} (1-t)^{b-1} / (B(a, b) (1+t)^{a+b}).
BaselineCdf make_beta3_unit(double a, double b);
/// Density K t^{a-1} (1-t)^{b-1} e^{-ct} on (0, 1), K fixed by normalisation.
BaselineCdf make_kummer_beta(double a, double b, double c,
                             const numerics::Tolerances& tol = numerics::Tolerances{});
BaselineCdf make_discrete_step(std::vector<Jump> jumps);

/// Builds a baseline from its family name and named parameters.
BaselineCdf make_baseline(const std::string& family, const ParamList& params, const std::vector<Jump>& jumps = {});

/// Names accepted by make_baseline.
std::vector<std::string> baseline_families();

/// max(F(hi) - F(lo), 0). Quadrature is used when F has no closed-form CDF.
double cdf_segment_mass(const BaselineCdf& f, ExtReal lo, ExtReal hi,
                        const numerics::Tolerances& tol = numerics::Tolerances{});

/// Smallest x with F(x) >= p, found by bisection (atoms are returned exactly).
double baseline_quantile(const BaselineCdf& f, double p);

}  // namespace gencdf
