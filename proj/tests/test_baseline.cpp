#include <doctest.h>

#include <cmath>
#include <random>

#include "gencdf/baseline.hpp"
#include "gencdf/errors.hpp"

using namespace gencdf;

namespace {

// Composite Simpson rule; an independent check on the adaptive quadrature.
template <typename F>
double simpson(F f, double lo, double hi, int panels = 20000) {
    const double h = (hi - lo) / panels;
    double s = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

std::vector<BaselineCdf> shipped() {
    return {make_uniform01(),
            make_uniform(-1.0, 2.0),
            make_beta(2.0, 2.0),
            make_beta(0.5, 3.0),
            make_power(0.5),
            make_kumaraswamy_kernel(2.0, 3.0),
            make_gamma(2.0, 1.0),
            make_gamma(0.5, 2.0),
            make_exponential(1.5),
            make_normal(1.0, 2.0),
            make_beta3(2.0, 3.0),
            make_beta3(0.5, 1.0),
            make_beta3_unit(2.0, 2.0),
            make_kummer_beta(2.0, 3.0, 1.0),
            make_kummer_beta(2.0, 2.0, -1.0),
            make_discrete_step({{0.0, 0.25}, {0.5, 0.5}, {2.0, 0.25}})};
}

}  // namespace

TEST_CASE("closed-form values") {
    CHECK(make_uniform01().eval(0.5) == 0.5);
    CHECK(make_uniform01().eval(-1.0) == 0.0);
    CHECK(make_uniform01().eval(2.0) == 1.0);
    CHECK(make_beta(2.0, 2.0).eval(0.25) == doctest::Approx(0.15625).epsilon(1e-14));
    CHECK(make_beta(2.0, 2.0).eval(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(make_power(2.0).eval(0.5) == doctest::Approx(0.25));
    CHECK(make_power(0.5).eval(0.25) == doctest::Approx(0.5));
    CHECK(make_kumaraswamy_kernel(2.0, 3.0).eval(0.5) == doctest::Approx(0.578125).epsilon(1e-14));
    CHECK(make_gamma(2.0, 1.0).eval(2.0) == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-13));
    CHECK(make_beta3(1.0, 1.0).eval(1.0) == doctest::Approx(simpson([](double t) { return 1.0 / ((1 + t) * (1 + t)); }, 0.0, 1.0)).epsilon(1e-12));
    CHECK(make_beta3(2.0, 2.0).eval(ExtReal::pos_infinity()) == 1.0);
    CHECK_THROWS_AS(make_beta(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(make_gamma(1.0, -1.0), DomainError);
}

TEST_CASE("beta3 substitution identity") {
    for (double a : {0.5, 1.0, 2.0}) {
        for (double b : {0.5, 1.0, 2.0}) {
            const auto f = make_beta3(a, b);
            for (double x : {0.1, 1.0, 10.0}) {
                const auto q = numerics::integrate([&](double t) { return f.density(t); }, ExtReal(0.0), ExtReal(x),
                                                   1e-12);
                CHECK(f.eval(x) == doctest::Approx(q.value).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("unit beta3 cdf matches its density") {
    const auto f = make_beta3_unit(2.0, 3.0);
    for (double x : {0.1, 0.4, 0.9}) {
        CHECK(f.eval(x) == doctest::Approx(simpson([&](double t) { return f.density(t); }, 0.0, x)).epsilon(1e-10));
    }
}

TEST_CASE("kummer beta") {
    const auto k0 = make_kummer_beta(2.0, 3.0, 0.0);
    const auto b = make_beta(2.0, 3.0);
    for (int i = 0; i <= 100; ++i) CHECK(k0.eval(i / 100.0) == doctest::Approx(b.eval(i / 100.0)).epsilon(1e-9));
    CHECK(k0.eval(0.0) == 0.0);

    const auto k = make_kummer_beta(2.0, 3.0, 1.0);
    const auto kernel = [](double t) { return t * (1 - t) * (1 - t) * std::exp(-t); };
    const double oracle = simpson(kernel, 0.0, 0.5) / simpson(kernel, 0.0, 1.0);
    CHECK(k.eval(0.5) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(cdf_segment_mass(k, ExtReal(0.0), ExtReal(0.5)) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("discrete step") {
    const auto d = make_discrete_step({{0.0, 0.5}, {1.0, 0.5}});
    CHECK(d.eval(0.0) == 0.5);
    CHECK(d.eval(-0.5) == 0.0);
    CHECK(d.eval(0.5) == 0.5);
    CHECK(d.eval(1.0) == 1.0);
    CHECK(baseline_quantile(d, 0.7) == 1.0);
    CHECK(baseline_quantile(d, 0.5) == 0.0);
    CHECK_THROWS_AS(make_discrete_step({{1.0, 0.5}, {0.0, 0.5}}), DomainError);
    CHECK_THROWS_AS(make_discrete_step({{0.0, 0.5}, {1.0, 0.4}}), DomainError);
}

TEST_CASE("axiom scan over shipped baselines") {
    for (const auto& f : shipped()) {
        CAPTURE(f.family());
        const double lo = f.support_lo().is_finite() ? f.support_lo().raw() : baseline_quantile(f, 1e-9);
        const double hi = f.support_hi().is_finite() ? f.support_hi().raw() : baseline_quantile(f, 1.0 - 1e-9);
        double prev = f.eval(lo - 1.0);
        CHECK(prev <= 1e-8);
        for (int i = 0; i <= 1000; ++i) {
            const double v = f.eval(lo + (hi - lo) * i / 1000.0);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
        CHECK(f.eval(hi + 1.0) >= 1.0 - 1e-8);
        CHECK(cdf_segment_mass(f, ExtReal::neg_infinity(), ExtReal::pos_infinity()) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("segment masses are additive and monotone") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& f : shipped()) {
        CAPTURE(f.family());
        const double lo = baseline_quantile(f, 0.05);
        const double hi = baseline_quantile(f, 0.95);
        for (int i = 0; i < 5; ++i) {
            const double mid = lo + (hi - lo) * u(rng);
            const double whole = cdf_segment_mass(f, ExtReal(lo), ExtReal(hi));
            const double parts = cdf_segment_mass(f, ExtReal(lo), ExtReal(mid)) + cdf_segment_mass(f, ExtReal(mid), ExtReal(hi));
            CHECK(parts == doctest::Approx(whole).epsilon(2e-10));
            CHECK(cdf_segment_mass(f, ExtReal(lo - 0.1), ExtReal(hi)) >= whole);
        }
        CHECK(cdf_segment_mass(f, ExtReal(0.3), ExtReal(0.3)) == 0.0);
    }
    CHECK(cdf_segment_mass(make_uniform01(), ExtReal(0.2), ExtReal(0.7)) == doctest::Approx(0.5));
}

TEST_CASE("quantiles invert continuous baselines") {
    for (const auto& f : shipped()) {
        if (f.is_discrete()) continue;
        CAPTURE(f.family());
        for (double p : {0.01, 0.3, 0.5, 0.99}) CHECK(f.eval(baseline_quantile(f, p)) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("make_baseline by name") {
    CHECK(make_baseline("beta", {{"a", 2.0}, {"b", 2.0}}).eval(0.25) == doctest::Approx(0.15625));
    CHECK_THROWS_AS(make_baseline("beta", {{"a", 2.0}}), DomainError);
    CHECK_THROWS_AS(make_baseline("beta", {{"a", 2.0}, {"b", 1.0}, {"c", 1.0}}), DomainError);
    CHECK_THROWS_AS(make_baseline("cauchy", {}), DomainError);
}
