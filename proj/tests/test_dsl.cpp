#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gencdf/dsl.hpp"
#include "gencdf/errors.hpp"

using namespace gencdf;
using namespace gencdf::dsl;

namespace {

double at(const MonotoneExpr& e, std::vector<double> p) { return e.eval(p).raw(); }

// Checks the inferred direction against a 33-point scan along each axis
// from several base points.
void check_direction_by_scan(const MonotoneExpr& e) {
    const auto dirs = e.infer_direction();
    const std::size_t m = e.arity();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<double> base(m);
        for (auto& b : base) b = trial == 0 ? 0.0 : (trial == 1 ? 1.0 : u(rng));
        for (std::size_t z = 0; z < m; ++z) {
            double prev = 0.0;
            for (int i = 0; i <= 32; ++i) {
                auto p = base;
                p[z] = i / 32.0;
                const double v = at(e, p);
                if (i > 0 && std::isfinite(v) && std::isfinite(prev)) {
                    const double tol = 1e-12 * std::max(1.0, std::abs(v));
                    switch (dirs[z].kind) {
                        case Monotonicity::Constant:
                            CHECK(std::abs(v - prev) <= tol);
                            break;
                        case Monotonicity::Nondecreasing:
                            CHECK(v >= prev - tol);
                            if (dirs[z].strict) CHECK(v > prev);
                            break;
                        case Monotonicity::Nonincreasing:
                            CHECK(v <= prev + tol);
                            if (dirs[z].strict) CHECK(v < prev);
                            break;
                        case Monotonicity::Unknown:
                            break;
                    }
                }
                prev = v;
            }
        }
    }
}

}  // namespace

TEST_CASE("parse produces the documented trees") {
    const auto e = parse("1 - (1 - g1^2)^3", 1);
    REQUIRE(e.root().kind == NodeKind::Complement);
    const auto& p = *e.root().children[0];
    REQUIRE(p.kind == NodeKind::Power);
    CHECK(p.param == 3.0);
    REQUIRE(p.children[0]->kind == NodeKind::Complement);
    CHECK(p.children[0]->children[0]->kind == NodeKind::Power);

    const auto l = parse("-ln(1 - g1*g2)", 2);
    REQUIRE(l.root().kind == NodeKind::NegLogComplement);
    CHECK(l.root().children[0]->kind == NodeKind::Product);

    CHECK(parse("0.3 + (1 - 0.3)*g1", 1).root().kind == NodeKind::AffineMix);
    CHECK(parse("(1 - 0.3)*g1 + 0.3", 1).root().kind == NodeKind::AffineMix);
    CHECK(parse("2*g1", 1).root().kind == NodeKind::Scale);
    CHECK(parse("inf", 3).root().kind == NodeKind::PosInf);
    CHECK(parse("-inf", 3).root().kind == NodeKind::NegInf);
    CHECK(parse("(2 + 3)*0.5", 1).root().kind == NodeKind::Const);
    CHECK(parse("g1/(g1 + 2*(1 - g1))", 1).root().kind == NodeKind::Ratio);
}

TEST_CASE("evaluation and corner values") {
    const auto e = parse("1 - (1 - g1^2)^3", 1);
    CHECK(at(e, {0.5}) == doctest::Approx(1.0 - std::pow(0.75, 3)).epsilon(1e-15));
    const auto [c0, c1] = e.corner_values();
    CHECK(c0.raw() == 0.0);
    CHECK(c1.raw() == 1.0);

    const auto l = parse("-ln(1 - g1*g2)", 2);
    CHECK(l.corner_values().second.is_pos_infinity());
    CHECK(at(l, {0.5, 0.5}) == doctest::Approx(-std::log(0.75)));
    CHECK(parse("-ln(g1)", 1).corner_values().first.is_pos_infinity());
    CHECK(at(parse("exp(-(3*g1))", 1), {1.0}) == doctest::Approx(std::exp(-3.0)));

    CHECK_THROWS_AS((void)e.eval(std::vector<double>{1.5}), DomainError);
    CHECK_THROWS_AS((void)e.eval(std::vector<double>{0.5, 0.5}), DomainError);
    CHECK_THROWS_AS((void)parse("-ln(g1) + -inf", 1).eval(std::vector<double>{0.0}), DomainError);
}

TEST_CASE("parse errors carry offsets") {
    try {
        (void)parse("g1 + g3", 2);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 5);
    }
    CHECK_THROWS_AS((void)parse("g1 +", 1), ParseError);
    CHECK_THROWS_AS((void)parse("g1 ) ", 1), ParseError);
    CHECK_THROWS_AS((void)parse("g1 / (g1 - 0.5)", 1), ParseError);
    CHECK_THROWS_AS((void)parse("x", 1), ParseError);
    CHECK_THROWS_AS((void)parse("-g1", 1), ParseError);
}

TEST_CASE("printing round-trips") {
    const char* texts[] = {
        "1 - (1 - g1^2)^3",
        "-ln(1 - g1*g2)",
        "0.25 + (1 - 0.25)*g1",
        "g1*g2*g3",
        "(g1 + g2)/(g1 + g2 + 0.5*(1 - g1) + 0.5)",
        "g1/(g1 + 3*(1 - g1))",
        "1 - exp(-(2*g1))",
        "(-ln(g1))^1.5",
        "g1 - 0.5",
        "g1 - g2",
        "2 - g1",
        "-ln(g1) + 0.1",
        "-2*g1 + 1",
        "0.1*(0.5 + (1 - 0.5)*g1)^2 - ln(g2)",
    };
    for (const char* t : texts) {
        CAPTURE(t);
        const std::size_t m = 3;
        const auto e = parse(t, m);
        const auto again = parse(e.to_string(), m);
        CHECK(e == again);
        CHECK(again.to_string() == e.to_string());
    }
}

TEST_CASE("inferred directions agree with scans") {
    const char* texts[] = {
        "g1", "1 - g1", "g1*g2", "(1 - g1)*g2", "g1^0.3", "(1 - g2)^4", "-ln(g1)", "-ln(1 - g1*g2)",
        "0.2 + (1 - 0.2)*g2", "exp(-(g1))", "g1/(g1 + 2*(1 - g1))", "2*(1 - g1)/(g1 + 2*(1 - g1))",
        "1 - exp(-(3*g1))", "g1 + g2 - 1", "g1 - g2", "-2*g1*g2",
    };
    for (const char* t : texts) {
        CAPTURE(t);
        check_direction_by_scan(parse(t, 2));
    }
    const auto d = parse("g1 - g2", 2).infer_direction();
    CHECK(d[0].kind == Monotonicity::Nondecreasing);
    CHECK(d[1].kind == Monotonicity::Nonincreasing);
    CHECK(parse("g1*g2", 2).infer_direction()[0].strict == false);
    CHECK(parse("(0.5 + (1 - 0.5)*g1)*g2", 2).infer_direction()[1].strict);
    CHECK(parse("g1 + (1 - g1)^2", 1).infer_direction()[0].kind == Monotonicity::Unknown);
    const auto mo = parse("g1/(g1 + 2*(1 - g1))", 1).infer_direction()[0];
    CHECK(mo.kind == Monotonicity::Nondecreasing);
    CHECK(mo.strict);
}

TEST_CASE("partial derivatives against finite differences") {
    const char* texts[] = {"1 - (1 - g1^2)^3", "-ln(1 - g1*g2)", "g1/(g1 + 2*(1 - g1))", "exp(-(g1*g2))",
                           "(0.5 + (1 - 0.5)*g2)^2.5", "-ln(g1)"};
    const std::vector<double> p{0.37, 0.61};
    for (const char* t : texts) {
        CAPTURE(t);
        const auto e = parse(t, 2);
        for (std::size_t z = 1; z <= 2; ++z) {
            const auto r = partial(e, z, p);
            CHECK(r.symbolic);
            auto hi = p, lo = p;
            hi[z - 1] += 1e-6;
            lo[z - 1] -= 1e-6;
            const double fd = (at(e, hi) - at(e, lo)) / 2e-6;
            CHECK(r.value == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    // g^0.5 at 0 has an infinite slope; the finite-difference fallback is
    // one-sided and flagged.
    const auto r = partial(parse("g1^0.5", 1), 1, std::vector<double>{0.0});
    CHECK_FALSE(r.symbolic);
    CHECK(r.value > 100.0);
    CHECK_THROWS_AS((void)partial(parse("-ln(g1)", 1), 1, std::vector<double>{0.0}), DomainError);
}

TEST_CASE("compose substitutes the inner map") {
    const auto outer = parse("g1/(g1 + 2*(1 - g1))", 1);
    const auto inner = parse("g1*g2", 2);
    const auto c = outer.compose(inner);
    CHECK(c.arity() == 2);
    const double x = 0.3 * 0.8;
    CHECK(at(c, {0.3, 0.8}) == doctest::Approx(x / (x + 2.0 * (1.0 - x))));
    CHECK(c == parse("(g1*g2)/(g1*g2 + 2*(1 - g1*g2))", 2));
}

TEST_CASE("ratio floors") {
    CHECK_THROWS_AS((void)ratio(var(1, 1), var(1, 1)), DomainError);
    const auto r = ratio(var(1, 1), sum({var(1, 1), constant(0.5, 1)}));
    CHECK(r.root().param == doctest::Approx(0.5));
    const auto declared = ratio(var(1, 1), sum({product({var(1, 1), var(1, 1)}), constant(0.1, 1)}), 0.05);
    CHECK(at(declared, {1.0}) == doctest::Approx(1.0 / 1.1));
    CHECK_THROWS_AS((void)ratio(var(1, 1), var(1, 1), 0.5), DomainError);
}

TEST_CASE("opaque maps") {
    const auto o = opaque([](std::span<const double> p) { return p[0] * p[0]; },
                          {Direction{Monotonicity::Nondecreasing, true}}, Range{0.0, 1.0}, "square");
    CHECK(at(o, {0.5}) == 0.25);
    CHECK_THROWS_AS((void)o.to_string(), DomainError);
    const auto r = partial(o, 1, std::vector<double>{0.5});
    CHECK_FALSE(r.symbolic);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
}
