#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gencdf/errors.hpp"
#include "gencdf/spec_document.hpp"
#include "spec_helpers.hpp"

using namespace gencdf;

namespace {

const char* kBeta1 = R"({
  "form": "direct", "n": 1, "m": 1,
  "expressions": {"U": "1", "V": "0", "upper": ["g1"], "lower": ["0"],
                  "m_lower": ["0"], "v_upper": ["0"]},
  "baseline_f": {"family": "beta", "params": {"a": 2, "b": 2}},
  "baselines_g": [{"family": "uniform01"}]
})";

void check_same(const GeneratorSpec& a, const GeneratorSpec& b) {
    CHECK(a.form == b.form);
    CHECK(a.scale_u == b.scale_u);
    CHECK(a.scale_v == b.scale_v);
    REQUIRE(a.n() == b.n());
    REQUIRE(a.m() == b.m());
    for (std::size_t j = 0; j < a.n(); ++j) {
        CHECK(a.limits[j].upper == b.limits[j].upper);
        CHECK(a.limits[j].lower == b.limits[j].lower);
        CHECK(a.limits[j].m_lower == b.limits[j].m_lower);
        CHECK(a.limits[j].v_upper == b.limits[j].v_upper);
    }
    CHECK(a.baseline_f.family() == b.baseline_f.family());
    CHECK(a.baseline_f.params() == b.baseline_f.params());
    for (std::size_t i = 0; i < a.m(); ++i) {
        CHECK(a.baselines_g[i].family() == b.baselines_g[i].family());
        CHECK(a.baselines_g[i].params() == b.baselines_g[i].params());
        CHECK(a.baselines_g[i].jumps().size() == b.baselines_g[i].jumps().size());
    }
}

}  // namespace

TEST_CASE("parse a beta1-G document") {
    const auto s = parse_spec(kBeta1);
    CHECK(s.form == Form::Direct);
    CHECK(s.baseline_f.param("a") == 2.0);
    CHECK(validate(s).passed());
    CHECK(build(s).eval_cdf(0.25) == doctest::Approx(0.15625));
}

TEST_CASE("documents round-trip") {
    std::vector<GeneratorSpec> specs{parse_spec(kBeta1)};
    for (const auto& [id, spec] : testing_support::single_failure_specs()) specs.push_back(spec);
    specs.push_back(testing_support::make_spec(
        Form::Complementary, "1", "1", {{"0", "0", "0", "(1 - g1)*(1 - g2)"}}, make_power(2.0),
        {make_normal(1.0, 2.0), make_discrete_step({{0.0, 0.5}, {1.5, 0.5}})}));
    for (const auto& s : specs) {
        const auto text = write_spec(s);
        const auto back = parse_spec(text);
        check_same(s, back);
        CHECK(write_spec(back) == text);
    }
}

TEST_CASE("syntax errors carry offsets") {
    try {
        (void)parse_spec("{\"form\": \"direct\",, }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 19);
    }
    std::string bad(kBeta1);
    bad.replace(bad.find("[\"g1\"]"), 6, "[\"g1 +\"]");
    try {
        (void)parse_spec(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("expressions.upper[0]") != std::string::npos);
    }
}

TEST_CASE("semantic errors") {
    auto with = [](const std::string& from, const std::string& to) {
        std::string t(kBeta1);
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_THROWS_AS((void)parse_spec(with("\"direct\"", "\"sideways\"")), DomainError);
    CHECK_THROWS_AS((void)parse_spec(with("\"n\": 1", "\"n\": 2")), DomainError);
    CHECK_THROWS_AS((void)parse_spec(with("\"m\": 1", "\"m\": 0")), DomainError);
    CHECK_THROWS_AS((void)parse_spec(with("\"uniform01\"", "\"zeta\"")), DomainError);
    CHECK_THROWS_AS((void)parse_spec(with("\"a\": 2", "\"c\": 2")), DomainError);
    CHECK_THROWS_AS((void)parse_spec("[1, 2]"), DomainError);
}

TEST_CASE("load from a file") {
    const auto path = std::filesystem::temp_directory_path() / "gencdf_spec_test.json";
    {
        std::ofstream out(path);
        out << kBeta1;
    }
    CHECK(load_spec(path).m() == 1);
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)load_spec(path), DomainError);
}
