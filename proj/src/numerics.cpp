#include "gencdf/numerics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace gencdf {

std::string ExtReal::to_string() const { return format_real(value_); }

std::string format_real(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string format_real17(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

}  // namespace gencdf

namespace gencdf::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 1000;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw DomainError("incomplete beta continued fraction did not converge");
}

double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 10 * kMaxIterations; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw DomainError("incomplete gamma series did not converge");
}

// Upper regularized gamma Q(a, x) by continued fraction, valid for x > a + 1.
double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10 * kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
        }
    }
    throw DomainError("incomplete gamma continued fraction did not converge");
}

// Gauss-Kronrod 10/21 nodes and weights on [-1, 1].
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const RealFunction& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = kWgk[10] * fc;
    double gauss = 0.0;
    double abs_sum = std::fabs(kronrod);
    std::array<double, 10> f1{};
    std::array<double, 10> f2{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double s = f1[j] + f2[j];
        kronrod += kWgk[j] * s;
        abs_sum += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    const double mean = 0.5 * kronrod;
    double asc = kWgk[10] * std::fabs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }
    const double result = kronrod * half;
    abs_sum *= std::fabs(half);
    asc *= std::fabs(half);
    double err = std::fabs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * abs_sum, err);
    }
    if (!std::isfinite(result) || !std::isfinite(err)) {
        throw DomainError("integrand is not finite on [" + format_real(lo) + ", " + format_real(hi) + "]");
    }
    return {lo, hi, result, err};
}

}  // namespace

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta requires a > 0 and b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    double value;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        value = front * beta_continued_fraction(x, a, b) / a;
    } else {
        value = 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
    }
    return std::clamp(value, 0.0, 1.0);
}

double regularized_lower_gamma(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("incomplete gamma requires shape > 0 and rate > 0");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
    const double z = rate * x;
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;
    const double value = z < shape + 1.0 ? gamma_series(shape, z) : 1.0 - gamma_continued_fraction(shape, z);
    return std::clamp(value, 0.0, 1.0);
}

QuadratureResult adaptive_quadrature(const RealFunction& f, double lo, double hi, double tol,
                                     std::size_t max_panels) {
    if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("adaptive_quadrature needs finite bounds");
    if (lo == hi) return {0.0, 0.0, 0};
    if (hi < lo) {
        auto r = adaptive_quadrature(f, hi, lo, tol, max_panels);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod(f, lo, hi);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    std::size_t count = 1;

    while (total_err > tol) {
        if (count >= max_panels) {
            throw QuadratureError("adaptive quadrature exceeded its panel budget", total, total_err);
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            throw QuadratureError("adaptive quadrature reached machine resolution", total, total_err);
        }
        Panel left = gauss_kronrod(f, worst.lo, mid);
        Panel right = gauss_kronrod(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
        // Running sums drift; recompute once the estimate claims convergence.
        if (total_err <= tol) {
            auto copy = panels;
            total = 0.0;
            total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().error;
                copy.pop();
            }
        }
    }
    return {total, total_err, count};
}

QuadratureResult integrate(const RealFunction& f, ExtReal lo, ExtReal hi, double tol, std::size_t max_panels) {
    if (lo == hi) return {0.0, 0.0, 0};
    if (hi < lo) {
        auto r = integrate(f, hi, lo, tol, max_panels);
        r.value = -r.value;
        return r;
    }
    if (lo.is_finite() && hi.is_finite()) return adaptive_quadrature(f, lo.raw(), hi.raw(), tol, max_panels);

    // x = a + t / (1 - t) on [0, 1) for [a, inf); mirrored for (-inf, b];
    // x = t / (1 - t^2) on (-1, 1) for the whole line.
    if (lo.is_finite()) {
        const double a = lo.raw();
        auto g = [&](double t) {
            if (t >= 1.0) return 0.0;
            const double s = 1.0 - t;
            const double v = f(a + t / s);
            return v == 0.0 ? 0.0 : v / (s * s);
        };
        return adaptive_quadrature(g, 0.0, 1.0, tol, max_panels);
    }
    if (hi.is_finite()) {
        const double b = hi.raw();
        auto g = [&](double t) {
            if (t >= 1.0) return 0.0;
            const double s = 1.0 - t;
            const double v = f(b - t / s);
            return v == 0.0 ? 0.0 : v / (s * s);
        };
        return adaptive_quadrature(g, 0.0, 1.0, tol, max_panels);
    }
    auto g = [&](double t) {
        const double s = 1.0 - t * t;
        if (s <= 0.0) return 0.0;
        const double v = f(t / s);
        return v == 0.0 ? 0.0 : v * (1.0 + t * t) / (s * s);
    };
    return adaptive_quadrature(g, -1.0, 1.0, tol, max_panels);
}

double bracketed_root(const RealFunction& f, double target, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw DomainError("root tolerance must be positive");
    if (!(lo <= hi)) throw DomainError("root bracket is reversed");
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo <= target && target <= fhi)) {
        throw DomainError("root bracket does not contain the target: f(lo) = " + format_real(flo) +
                          ", f(hi) = " + format_real(fhi) + ", target = " + format_real(target));
    }
    if (flo >= target) return lo;
    // Invariant: f(lo) < target <= f(hi).
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi)) break;
        if (f(mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace gencdf::numerics
