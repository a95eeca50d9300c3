#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gencdf/errors.hpp"
#include "gencdf/ext_real.hpp"
#include "gencdf/numerics.hpp"

using namespace gencdf;
using namespace gencdf::numerics;

TEST_CASE("incomplete beta against closed forms") {
    for (double x : {0.0, 0.05, 0.25, 0.5, 0.8, 0.99, 1.0}) {
        CHECK(regularized_incomplete_beta(x, 2.0, 2.0) == doctest::Approx(x * x * (3.0 - 2.0 * x)).epsilon(1e-13));
        CHECK(regularized_incomplete_beta(x, 1.0, 3.5) == doctest::Approx(1.0 - std::pow(1.0 - x, 3.5)).epsilon(1e-13));
        CHECK(regularized_incomplete_beta(x, 0.7, 1.0) == doctest::Approx(std::pow(x, 0.7)).epsilon(1e-13));
    }
    CHECK(regularized_incomplete_beta(0.25, 2.0, 2.0) == doctest::Approx(0.15625).epsilon(1e-14));
    // arcsine law: I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
    for (double x : {0.1, 0.3, 0.6, 0.95}) {
        CHECK(regularized_incomplete_beta(x, 0.5, 0.5) ==
              doctest::Approx(2.0 / std::numbers::pi * std::asin(std::sqrt(x))).epsilon(1e-12));
    }
}

TEST_CASE("incomplete beta symmetry and monotonicity") {
    const double shapes[] = {0.3, 1.0, 2.5, 7.0, 40.0};
    for (double a : shapes) {
        for (double b : shapes) {
            double prev = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double x = i / 40.0;
                const double v = regularized_incomplete_beta(x, a, b);
                CHECK(v >= prev - 1e-15);
                CHECK(v + regularized_incomplete_beta(1.0 - x, b, a) == doctest::Approx(1.0).epsilon(1e-12));
                prev = v;
            }
        }
    }
}

TEST_CASE("incomplete beta rejects bad arguments") {
    CHECK_THROWS_AS(regularized_incomplete_beta(1.5, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("incomplete gamma against closed forms") {
    for (double x : {0.0, 0.1, 1.0, 2.0, 5.0, 30.0}) {
        CHECK(regularized_lower_gamma(x, 1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0 * x)).epsilon(1e-13));
        CHECK(regularized_lower_gamma(x, 2.0, 1.0) == doctest::Approx(1.0 - (1.0 + x) * std::exp(-x)).epsilon(1e-13));
        CHECK(regularized_lower_gamma(x, 0.5, 1.0) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-13));
    }
    CHECK(regularized_lower_gamma(1.0, 2.0, 2.0) == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-13));
    CHECK(regularized_lower_gamma(std::numeric_limits<double>::infinity(), 3.0, 1.0) == 1.0);
}

TEST_CASE("log beta") {
    CHECK(log_beta(2.0, 3.0) == doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-14));
    CHECK(log_beta(0.5, 0.5) == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature on smooth, singular and infinite ranges") {
    const double tol = 1e-10;
    CHECK(adaptive_quadrature([](double x) { return x * x; }, 0.0, 1.0, tol).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(adaptive_quadrature([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, tol).value ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(integrate([](double x) { return std::exp(-x); }, ExtReal(0.0), ExtReal::pos_infinity(), tol).value ==
          doctest::Approx(1.0).epsilon(1e-10));
    const auto normal = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    CHECK(integrate(normal, ExtReal::neg_infinity(), ExtReal::pos_infinity(), tol).value ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate(normal, ExtReal::neg_infinity(), ExtReal(0.0), tol).value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(integrate(normal, ExtReal(1.0), ExtReal(1.0), tol).value == 0.0);
}

TEST_CASE("quadrature error estimate bounds the actual error") {
    for (double k : {1.0, 5.0, 20.0}) {
        const auto r = adaptive_quadrature([k](double x) { return std::cos(k * x); }, 0.0, 2.0, 1e-8);
        CHECK(std::abs(r.value - std::sin(2.0 * k) / k) <= std::max(r.error, 1e-14) * 10.0);
    }
}

TEST_CASE("quadrature budget exhaustion is reported") {
    const auto wild = [](double x) { return std::sin(1.0 / (x + 1e-9)); };
    try {
        (void)adaptive_quadrature(wild, 0.0, 1.0, 1e-14, 5);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.error_estimate() > 0.0);
    }
    CHECK_THROWS((void)adaptive_quadrature([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10));
}

TEST_CASE("bracketed root finds the generalized inverse") {
    const auto sq = [](double x) { return x * x; };
    CHECK(bracketed_root(sq, 0.25, 0.0, 1.0, 1e-13) == doctest::Approx(0.5).epsilon(1e-12));
    const auto step = [](double x) { return x < 0.3 ? 0.0 : 1.0; };
    const double r = bracketed_root(step, 0.5, 0.0, 1.0, 1e-12);
    CHECK(r >= 0.3);
    CHECK(r - 0.3 <= 1e-11);
    CHECK_THROWS_AS(bracketed_root(sq, 2.0, 0.0, 1.0, 1e-12), DomainError);
}

TEST_CASE("extended reals") {
    CHECK(ExtReal::pos_infinity() > ExtReal(1e300));
    CHECK(ExtReal::neg_infinity() < ExtReal(-1e300));
    CHECK_THROWS_AS(ExtReal(std::nan("")), DomainError);
    CHECK_THROWS_AS((void)ExtReal::pos_infinity().finite(), DomainError);
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(approx_equal(ExtReal::pos_infinity(), ExtReal::pos_infinity(), 1e-12));
    CHECK_FALSE(approx_equal(ExtReal::pos_infinity(), ExtReal(1e300), 1e-12));
}
