#pragma once

#include <cstddef>
#include <functional>

#include "gencdf/ext_real.hpp"

namespace gencdf::numerics {

/// Tolerances shared by the numeric routines. Defaults are the values the
/// acceptance suite pins; construct a different instance to tighten them.
struct Tolerances {
    double quadrature = 1e-10;
    std::size_t max_panels = 10000;
    double root = 1e-12;
};

/// I_x(a, b), the regularized incomplete beta function.
double regularized_incomplete_beta(double x, double a, double b);

/// P(shape, rate * x), the regularized lower incomplete gamma function.
double regularized_lower_gamma(double x, double shape, double rate);

/// log B(a, b).
double log_beta(double a, double b);

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

using RealFunction = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (10/21) quadrature over a finite interval.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `tol` or the panel budget is exhausted, in which
/// case a QuadratureError carrying the best estimate is thrown.
QuadratureResult adaptive_quadrature(const RealFunction& f, double lo, double hi, double tol,
                                     std::size_t max_panels = Tolerances{}.max_panels);

/// As adaptive_quadrature, but either bound may be infinite. Infinite ranges
/// are mapped onto finite ones by a rational change of variable.
QuadratureResult integrate(const RealFunction& f, ExtReal lo, ExtReal hi, double tol,
                           std::size_t max_panels = Tolerances{}.max_panels);

/// Finds x in [lo, hi] with f(x) ~= target for nondecreasing f.
///
/// Returns the smallest x (to within `tol` in x) such that f(x) >= target,
/// which is the generalized inverse and also handles flat stretches and
/// jumps. Throws DomainError when target lies outside [f(lo), f(hi)].
double bracketed_root(const RealFunction& f, double target, double lo, double hi, double tol);

}  // namespace gencdf::numerics
