#include <doctest.h>

#include <set>

#include "gencdf/analysis.hpp"
#include "spec_helpers.hpp"

using namespace gencdf;
using testing_support::direct;

namespace {

GeneratorSpec gap_spec() {
    return testing_support::make_spec(Form::Direct, "1", "0", {{"0.5*(g1 + g2)", "0", "0", "0"}}, make_uniform01(),
                                      {make_uniform(0.0, 1.0), make_uniform(2.0, 3.0)});
}

}  // namespace

TEST_CASE("upper bound is the union of baseline supports") {
    const auto u = support_upper_bound(testing_support::identity_spec(make_uniform01()));
    CHECK(render(u) == "intervals: [0, 1]\natoms: none");
    CHECK(render(support_upper_bound(gap_spec())) == "intervals: [0, 1], [2, 3]\natoms: none");
    const auto d = support_upper_bound(
        testing_support::identity_spec(make_discrete_step({{0.0, 0.5}, {1.0, 0.5}})));
    CHECK(d.atoms == std::vector<double>{0.0, 1.0});
    CHECK(render(support_upper_bound(testing_support::identity_spec(make_normal(0, 1)))) ==
          "intervals: (-inf, inf)\natoms: none");
}

TEST_CASE("normalisation merges and drops covered atoms") {
    SupportSet s;
    s.intervals = {{ExtReal(2.0), ExtReal(3.0)}, {ExtReal(0.0), ExtReal(1.0)}, {ExtReal(0.5), ExtReal(2.0)}};
    s.atoms = {5.0, 0.7, 5.0};
    const auto n = normalized(s);
    REQUIRE(n.intervals.size() == 1);
    CHECK(n.intervals[0].hi.raw() == 3.0);
    CHECK(n.atoms == std::vector<double>{5.0});
}

TEST_CASE("exact support certificates") {
    const auto beta1 = direct("1", "0", {{"g1", "0", "0", "0"}}, make_beta(2.0, 2.0), {make_uniform01()});
    const auto e = support_exact_if_T4(beta1);
    REQUIRE(e.has_value());
    CHECK(agrees(*e, numeric_support_scan(build(beta1), 1001), 1e-6));

    const auto flat = direct("1", "0", {{"1", "0", "0", "0"}}, make_uniform01(), {make_uniform01()});
    CHECK_FALSE(support_exact_if_T4(flat).has_value());

    const auto gap = support_exact_if_T4(gap_spec());
    REQUIRE(gap.has_value());
    CHECK(agrees(*gap, numeric_support_scan(build(gap_spec()), 3001), 1e-6));

    const auto disc_f = direct("1", "0", {{"g1", "0", "0", "0"}}, make_discrete_step({{0.3, 0.5}, {0.7, 0.5}}),
                               {make_uniform01()});
    CHECK_FALSE(support_exact_if_T4(disc_f).has_value());
}

TEST_CASE("numeric scan") {
    SUBCASE("identity over uniform") {
        const auto s = numeric_support_scan(build(testing_support::identity_spec(make_uniform01())), 1001);
        REQUIRE(s.intervals.size() == 1);
        CHECK(s.intervals[0].lo.raw() == doctest::Approx(0.0).epsilon(1e-7));
        CHECK(s.intervals[0].hi.raw() == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(s.atoms.empty());
    }
    SUBCASE("gap is flat") {
        const auto h = build(gap_spec());
        const auto s = numeric_support_scan(h, 1001);
        CHECK(s.intervals.size() == 2);
        CHECK(h.eval_cdf(1.0 + 1e-3) == h.eval_cdf(2.0 - 1e-3));
        CHECK(contains(support_upper_bound(gap_spec()), s, 1e-6));
    }
    SUBCASE("discrete H has atoms") {
        const auto spec = testing_support::identity_spec(make_discrete_step({{-1.0, 0.2}, {0.5, 0.3}, {4.0, 0.5}}));
        const auto s = numeric_support_scan(build(spec), 1001);
        CHECK(s.intervals.empty());
        REQUIRE(s.atoms.size() == 3);
        CHECK(s.atoms[0] == doctest::Approx(-1.0).epsilon(1e-7));
        CHECK(s.atoms[1] == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(s.atoms[2] == doctest::Approx(4.0).epsilon(1e-7));
        CHECK(contains(support_upper_bound(spec), s, 1e-6));
        CHECK(agrees(support_upper_bound(spec), s, 1e-6));
    }
    SUBCASE("infinite supports are truncated") {
        const auto spec = testing_support::identity_spec(make_normal(1.0, 2.0));
        const auto s = numeric_support_scan(build(spec), 1001);
        REQUIRE(s.intervals.size() == 1);
        CHECK(contains(support_upper_bound(spec), s, 1e-6));
        CHECK(agrees(*support_exact_if_T4(spec), s, 1e-6));
    }
}

TEST_CASE("nature classification") {
    const auto disc = testing_support::identity_spec(make_discrete_step({{0.0, 0.5}, {1.0, 0.5}}));
    CHECK(render(classify_nature(disc)) == "nature: discrete (C3.1)");

    const auto t7 = direct("1", "1", {{"g1", "0", "0", "0"}}, make_discrete_step({{0.25, 0.5}, {0.75, 0.5}}),
                           {make_uniform01()});
    CHECK(render(classify_nature(t7)) == "nature: discrete (T7)");

    const auto beta1 = direct("1", "0", {{"g1", "0", "0", "0"}}, make_beta(2.0, 2.0), {make_uniform01()});
    CHECK(classify_nature(beta1).nature == Nature::ContinuousRv);
    CHECK(classify_nature(beta1).justification == "T6");

    const auto kummer = direct("1", "0", {{"g1", "0", "0", "0"}}, make_kummer_beta(2.0, 3.0, 1.0), {make_uniform01()});
    CHECK(classify_nature(kummer).nature == Nature::ContinuousRv);

    const auto no_t7 = direct("1", "0", {{"g1", "0", "0", "0"}}, make_discrete_step({{0.25, 0.5}, {0.75, 0.5}}),
                              {make_uniform01()});
    CHECK(render(classify_nature(no_t7)) == "nature: unknown");

    const auto rewrapped = rewrap_as_uniform(build(beta1));
    CHECK(classify_nature(rewrapped).nature == Nature::Unknown);
}

TEST_CASE("discrete verdicts keep few values") {
    const auto t7 = build(direct("1", "1", {{"g1", "0", "0", "0"}},
                                 make_discrete_step({{0.25, 0.5}, {0.75, 0.5}}), {make_normal(0, 1)}));
    std::set<double> values;
    for (int i = 0; i < 10000; ++i) values.insert(t7.eval_cdf(-5.0 + 10.0 * i / 9999.0));
    CHECK(values.size() <= 3);
}
