#pragma once

#include <array>
#include <string>
#include <vector>

#include "gencdf/generator.hpp"

namespace testing_support {

// Limits per term in the order mu, l, m, nu.
using Limits = std::array<std::string, 4>;

inline gencdf::GeneratorSpec make_spec(gencdf::Form form, const std::string& u, const std::string& v,
                                       const std::vector<Limits>& limits, gencdf::BaselineCdf f,
                                       std::vector<gencdf::BaselineCdf> gs) {
    const std::size_t m = gs.size();
    std::vector<gencdf::LimitSet> ls;
    for (const auto& l : limits) {
        ls.push_back(gencdf::LimitSet{gencdf::dsl::parse(l[0], m), gencdf::dsl::parse(l[1], m),
                                      gencdf::dsl::parse(l[2], m), gencdf::dsl::parse(l[3], m)});
    }
    return gencdf::GeneratorSpec{form, gencdf::dsl::parse(u, m), gencdf::dsl::parse(v, m), std::move(ls),
                                 std::move(f), std::move(gs)};
}

inline gencdf::GeneratorSpec direct(const std::string& u, const std::string& v, const std::vector<Limits>& limits,
                                    gencdf::BaselineCdf f, std::vector<gencdf::BaselineCdf> gs) {
    return make_spec(gencdf::Form::Direct, u, v, limits, std::move(f), std::move(gs));
}

inline gencdf::GeneratorSpec identity_spec(gencdf::BaselineCdf g) {
    return direct("1", "0", {{"g1", "0", "0", "0"}}, gencdf::make_uniform01(), {std::move(g)});
}

// One spec per condition d1..d10, each failing exactly that condition.
inline std::vector<std::pair<std::string, gencdf::GeneratorSpec>> single_failure_specs() {
    using namespace gencdf;
    auto u01 = [] { return std::vector<BaselineCdf>{make_uniform01()}; };
    return {
        {"d1", direct("1", "0.5 - g1", {{"g1", "0", "0", "0"}}, make_uniform01(), u01())},
        {"d2", direct("1", "0", {{"g1", "0", "1 - g1", "1"}}, make_uniform01(), u01())},
        {"d3", direct("1", "0", {{"0.5 + (1 - 0.5)*g1", "0", "0", "0"}}, make_uniform01(), u01())},
        {"d4", direct("1", "1 - g1", {{"g1", "0", "0", "0.5"}}, make_uniform01(), u01())},
        {"d5", direct("g1", "0", {{"0.2 + (1 - 0.2)*g1", "0.5*(1 - g1)", "0", "0"}}, make_uniform01(), u01())},
        {"d6", direct("1", "0", {{"0.9*g1", "0", "0", "0"}}, make_uniform01(), u01())},
        {"d7", direct("0.9", "0", {{"g1", "0", "0", "0"}}, make_uniform01(), u01())},
        {"d8", direct("1", "1", {{"0.5 + (1 - 0.5)*g1", "0", "0", "0.5"}}, make_uniform01(), u01())},
        {"d9", direct("1", "0", {{"0.5*g1", "0", "0", "0"}, {"0.6 + (1 - 0.6)*g1", "0.6", "0", "0"}},
                      make_uniform01(), u01())},
        {"d10", direct("1", "0", {{"g1", "0", "0", "0"}}, make_discrete_step({{0.5, 0.5}, {1.0, 0.5}}), u01())},
    };
}

}  // namespace testing_support
