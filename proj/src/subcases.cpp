#include <algorithm>
#include <array>
#include <cmath>

#include "gencdf/errors.hpp"
#include "gencdf/generator.hpp"

namespace gencdf {

namespace {

using dsl::MonotoneExpr;

void check_terms(const std::vector<ProductTerm>& terms) {
    if (terms.empty()) throw DomainError("product form needs at least one factor");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        const std::string k = std::to_string(i + 1);
        if (!(t.theta >= 0.0 && t.theta <= 1.0)) throw DomainError("theta_" + k + " must lie in [0, 1]");
        if (!(t.alpha >= 0.0) || !std::isfinite(t.alpha)) throw DomainError("alpha_" + k + " must be >= 0");
        const auto [u0, u1] = t.u.corner_values();
        const auto [v0, v1] = t.v.corner_values();
        if (!approx_equal(u0, ExtReal(0.0), 1e-12) || !approx_equal(u1, ExtReal(1.0), 1e-12)) {
            throw DomainError("u_" + k + " must satisfy u(0..0) = 0 and u(1..1) = 1");
        }
        if (!approx_equal(v0, ExtReal(1.0), 1e-12) || !approx_equal(v1, ExtReal(0.0), 1e-12)) {
            throw DomainError("v_" + k + " must satisfy v(0..0) = 1 and v(1..1) = 0");
        }
    }
}

// prod (mix(e_i, theta_i))^alpha_i
MonotoneExpr mixed_product(const std::vector<ProductTerm>& terms, bool use_u) {
    std::vector<MonotoneExpr> factors;
    for (const auto& t : terms) factors.push_back(dsl::power(dsl::affine_mix(use_u ? t.u : t.v, t.theta), t.alpha));
    return dsl::product(factors);
}

// prod (theta_i e_i)^alpha_i
MonotoneExpr scaled_product(const std::vector<ProductTerm>& terms, bool use_u) {
    std::vector<MonotoneExpr> factors;
    for (const auto& t : terms) factors.push_back(dsl::power(dsl::scale(use_u ? t.u : t.v, t.theta), t.alpha));
    return dsl::product(factors);
}

template <typename T>
const T& need(const std::optional<T>& slot, const char* name, std::string_view id) {
    if (!slot) throw DomainError("sub-case " + std::string(id) + " needs binding '" + name + "'");
    return *slot;
}

std::size_t arity_of(const SubcaseBindings& b, std::string_view id) {
    if (b.baselines_g.empty()) throw DomainError("sub-case " + std::string(id) + " needs baselines_g");
    return b.baselines_g.size();
}

ExtReal corner0(const MonotoneExpr& e) { return e.corner_values().first; }
ExtReal corner1(const MonotoneExpr& e) { return e.corner_values().second; }

MonotoneExpr const_of(ExtReal v, std::size_t m) { return dsl::constant(v.raw(), m); }

// F uniform on [lo, hi] for the uniform-slope rows.
BaselineCdf slope_baseline(ExtReal lo, ExtReal hi, std::string_view id) {
    if (!lo.is_finite() || !hi.is_finite() || !(lo.raw() < hi.raw())) {
        throw DomainError("sub-case " + std::string(id) + " needs finite corner values with lo < hi, got [" +
                          lo.to_string() + ", " + hi.to_string() + "]");
    }
    return make_uniform(lo.raw(), hi.raw());
}

// The single-map slope rows depend on e only through (e - e(0)) / (e(1) - e(0)),
// which 1 - e leaves unchanged; flip maps running against the row's direction.
MonotoneExpr oriented(const MonotoneExpr& e, bool nondecreasing) {
    const auto [c0, c1] = e.corner_values();
    if (c0.is_finite() && c1.is_finite() && (c0.raw() > c1.raw()) == nondecreasing) return dsl::complement(e);
    return e;
}

std::vector<ProductTerm> unit_term(std::size_t m) {
    // k = 1, alpha_1 = 0: the factor is 1 whatever u_1, v_1 and theta_1 are.
    return {ProductTerm{dsl::var(1, m), dsl::complement(dsl::var(1, m)), 0.5, 0.0}};
}

// Rows 1-6: the second sum is removed by m_1 = nu_1 = l_1(0..0), which
// also satisfies the corner equalities needed at (0..0).
LimitSet vanishing_second(const MonotoneExpr& upper, const MonotoneExpr& lower) {
    const auto c = const_of(corner0(lower), lower.arity());
    return LimitSet{upper, lower, c, c};
}

GeneratorSpec direct_row(std::string_view id, const SubcaseBindings& b, int row) {
    const std::size_t m = arity_of(b, id);
    const auto inf = dsl::pos_inf(m);
    const auto ninf = dsl::neg_inf(m);
    auto F = [&]() { return need(b.baseline_f, "baseline_f", id); };
    auto single = [&](std::vector<ProductTerm> terms, LimitSet limits, BaselineCdf f) {
        return product_form_direct(terms, {std::move(limits)}, std::move(f), b.baselines_g);
    };

    switch (row) {
        case 1: {
            if (b.limits.empty()) throw DomainError("sub-case 1S1C1.2 needs binding 'limits'");
            std::vector<LimitSet> limits;
            for (const auto& l : b.limits) limits.push_back(vanishing_second(l.upper, l.lower));
            return product_form_direct(unit_term(m), std::move(limits), F(), b.baselines_g);
        }
        case 2: {
            auto terms = b.products;
            if (terms.empty()) throw DomainError("sub-case 2S1C1.2 needs binding 'products'");
            for (auto& t : terms) t.theta = 0.0;
            return single(terms,
                          vanishing_second(need(b.upper, "upper", id), need(b.lower, "lower", id)), F());
        }
        case 3:
            return single(unit_term(m), vanishing_second(need(b.upper, "upper", id), need(b.lower, "lower", id)),
                          F());
        case 4: {
            const auto& mu = need(b.upper, "upper", id);
            const auto& l = need(b.lower, "lower", id);
            return single(unit_term(m), vanishing_second(mu, l), slope_baseline(corner1(l), corner1(mu), id));
        }
        case 5: {
            const auto mu = oriented(need(b.upper, "upper", id), true);
            const auto l = const_of(corner0(mu), m);
            return single(unit_term(m), vanishing_second(mu, l), slope_baseline(corner0(mu), corner1(mu), id));
        }
        case 6: {
            const auto l = oriented(need(b.lower, "lower", id), false);
            const auto mu = const_of(corner0(l), m);
            return single(unit_term(m), vanishing_second(mu, l), slope_baseline(corner1(l), corner0(l), id));
        }
        case 7: {
            if (b.limits.empty()) throw DomainError("sub-case 7S1C1.2 needs binding 'limits'");
            std::vector<LimitSet> limits;
            for (std::size_t j = 0; j < b.limits.size(); ++j) {
                // The first sum covers the whole line: (-inf, inf) then empty terms.
                limits.push_back(LimitSet{inf, j == 0 ? ninf : inf, b.limits[j].m_lower, b.limits[j].v_upper});
            }
            return product_form_direct(unit_term(m), std::move(limits), F(), b.baselines_g);
        }
        case 8: {
            auto terms = b.products;
            if (terms.empty()) throw DomainError("sub-case 8S1C1.2 needs binding 'products'");
            for (auto& t : terms) t.theta = 1.0;
            return single(terms, LimitSet{inf, ninf, need(b.m_lower, "m_lower", id), need(b.v_upper, "v_upper", id)},
                          F());
        }
        case 9:
            return single(unit_term(m),
                          LimitSet{inf, ninf, need(b.m_lower, "m_lower", id), need(b.v_upper, "v_upper", id)}, F());
        case 10: {
            const auto& mm = need(b.m_lower, "m_lower", id);
            const auto& nu = need(b.v_upper, "v_upper", id);
            return single(unit_term(m), LimitSet{inf, ninf, mm, nu}, slope_baseline(corner0(mm), corner0(nu), id));
        }
        case 11: {
            const auto nu = oriented(need(b.v_upper, "v_upper", id), false);
            const auto mm = const_of(corner1(nu), m);
            return single(unit_term(m), LimitSet{inf, ninf, mm, nu}, slope_baseline(corner1(nu), corner0(nu), id));
        }
        case 12: {
            const auto mm = oriented(need(b.m_lower, "m_lower", id), true);
            const auto nu = const_of(corner1(mm), m);
            return single(unit_term(m), LimitSet{inf, ninf, mm, nu}, slope_baseline(corner0(mm), corner1(mm), id));
        }
        case 13:
            return single(unit_term(m),
                          LimitSet{need(b.upper, "upper", id), need(b.lower, "lower", id),
                                   need(b.m_lower, "m_lower", id), need(b.v_upper, "v_upper", id)},
                          F());
        case 14: {
            LimitSet l{need(b.upper, "upper", id), need(b.lower, "lower", id), need(b.m_lower, "m_lower", id),
                       need(b.v_upper, "v_upper", id)};
            const ExtReal lo(corner1(l.lower).raw() + corner1(l.v_upper).raw());
            const ExtReal hi(corner1(l.m_lower).raw() + corner1(l.upper).raw());
            return single(unit_term(m), std::move(l), slope_baseline(lo, hi, id));
        }
        case 21:
        case 22: {
            if (b.products.empty()) throw DomainError("sub-case needs binding 'products'");
            if (row == 22) {
                for (const auto& t : b.products) {
                    if (!(t.alpha > 0.0)) throw DomainError("sub-case 22S1C1.2 needs alpha_i > 0");
                }
                return single(b.products, LimitSet{inf, ninf, ninf, inf}, F());
            }
            return single(b.products,
                          LimitSet{need(b.upper, "upper", id), need(b.lower, "lower", id),
                                   need(b.m_lower, "m_lower", id), need(b.v_upper, "v_upper", id)},
                          F());
        }
        default:
            break;
    }

    // Rows 15-20: one-variable maps composed with u_{k+1} and v_{k+1}.
    if (b.products.empty()) throw DomainError("sub-case " + std::string(id) + " needs binding 'products'");
    const double gamma = need(b.gamma, "gamma", id);
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
    const auto mixed = dsl::affine_mix(need(b.u_extra, "u_extra", id), gamma);
    const auto scaled = dsl::scale(need(b.v_extra, "v_extra", id), gamma);
    auto map = [&](const std::optional<MonotoneExpr>& slot, const char* name) -> const MonotoneExpr& {
        const auto& e = need(slot, name, id);
        if (e.arity() != 1) throw DomainError(std::string(name) + " must be a one-variable map");
        return e;
    };
    if (row == 15 || row == 18) {
        for (const auto& t : b.products) {
            if (!(t.alpha > 0.0)) throw DomainError("sub-case " + std::string(id) + " needs alpha_i > 0");
        }
    }
    switch (row) {
        case 15: {
            const auto& mu = map(b.mu_map, "mu_map");
            const auto& l = map(b.ell_map, "ell_map");
            return single(b.products, LimitSet{mu.compose(mixed), l.compose(mixed), l.compose(scaled), mu.compose(scaled)},
                          F());
        }
        case 16: {
            const auto& mu = map(b.mu_map, "mu_map");
            return single(b.products, LimitSet{mu.compose(mixed), ninf, ninf, mu.compose(scaled)}, F());
        }
        case 17: {
            const auto& l = map(b.ell_map, "ell_map");
            return single(b.products, LimitSet{inf, l.compose(mixed), l.compose(scaled), inf}, F());
        }
        case 18: {
            const auto& nu = map(b.nu_map, "nu_map");
            const auto& mm = map(b.m_map, "m_map");
            return single(b.products,
                          LimitSet{nu.compose(scaled), mm.compose(scaled), mm.compose(mixed), nu.compose(mixed)}, F());
        }
        case 19: {
            const auto& nu = map(b.nu_map, "nu_map");
            return single(b.products, LimitSet{nu.compose(scaled), ninf, ninf, nu.compose(mixed)}, F());
        }
        case 20: {
            const auto& mm = map(b.m_map, "m_map");
            return single(b.products, LimitSet{inf, mm.compose(scaled), mm.compose(mixed), inf}, F());
        }
        default:
            break;
    }
    throw DomainError("unknown sub-case " + std::string(id));
}

GeneratorSpec complementary_row(std::string_view id, const SubcaseBindings& b, int row) {
    const std::size_t m = arity_of(b, id);
    const auto inf = dsl::pos_inf(m);
    const auto ninf = dsl::neg_inf(m);
    auto F = [&]() { return need(b.baseline_f, "baseline_f", id); };
    auto single = [&](std::vector<ProductTerm> terms, LimitSet limits, BaselineCdf f) {
        return product_form_complementary(terms, {std::move(limits)}, std::move(f), b.baselines_g);
    };
    auto four = [&]() {
        return LimitSet{need(b.upper, "upper", id), need(b.lower, "lower", id), need(b.m_lower, "m_lower", id),
                        need(b.v_upper, "v_upper", id)};
    };
    switch (row) {
        case 13:
            return single(unit_term(m), four(), F());
        case 14: {
            LimitSet l = four();
            const ExtReal lo(corner0(l.m_lower).raw() + corner0(l.upper).raw());
            const ExtReal hi(corner0(l.lower).raw() + corner0(l.v_upper).raw());
            return single(unit_term(m), std::move(l), slope_baseline(lo, hi, id));
        }
        case 21:
            if (b.products.empty()) throw DomainError("sub-case needs binding 'products'");
            return single(b.products, four(), F());
        case 22:
            if (b.products.empty()) throw DomainError("sub-case needs binding 'products'");
            for (const auto& t : b.products) {
                if (!(t.alpha > 0.0)) throw DomainError("sub-case 22S1C1.3 needs alpha_i > 0");
            }
            return single(b.products, LimitSet{inf, ninf, ninf, inf}, F());
        default:
            break;
    }
    if (b.products.empty()) throw DomainError("sub-case " + std::string(id) + " needs binding 'products'");
    const double gamma = need(b.gamma, "gamma", id);
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
    const auto scaled = dsl::scale(need(b.u_extra, "u_extra", id), gamma);
    const auto mixed = dsl::affine_mix(need(b.v_extra, "v_extra", id), gamma);
    auto map = [&](const std::optional<MonotoneExpr>& slot, const char* name) -> const MonotoneExpr& {
        const auto& e = need(slot, name, id);
        if (e.arity() != 1) throw DomainError(std::string(name) + " must be a one-variable map");
        return e;
    };
    switch (row) {
        case 15: {
            const auto& mu = map(b.mu_map, "mu_map");
            const auto& l = map(b.ell_map, "ell_map");
            return single(b.products, LimitSet{mu.compose(scaled), l.compose(scaled), l.compose(mixed), mu.compose(mixed)},
                          F());
        }
        case 16: {
            const auto& mu = map(b.mu_map, "mu_map");
            return single(b.products, LimitSet{mu.compose(scaled), ninf, ninf, mu.compose(mixed)}, F());
        }
        case 17: {
            const auto& l = map(b.ell_map, "ell_map");
            return single(b.products, LimitSet{inf, l.compose(scaled), l.compose(mixed), inf}, F());
        }
        case 18: {
            const auto& mm = map(b.m_map, "m_map");
            const auto& nu = map(b.nu_map, "nu_map");
            return single(b.products,
                          LimitSet{mm.compose(scaled), nu.compose(scaled), nu.compose(mixed), mm.compose(mixed)}, F());
        }
        case 19: {
            const auto& mm = map(b.m_map, "m_map");
            return single(b.products, LimitSet{mm.compose(scaled), ninf, ninf, mm.compose(mixed)}, F());
        }
        case 20: {
            const auto& nu = map(b.nu_map, "nu_map");
            return single(b.products, LimitSet{inf, nu.compose(scaled), nu.compose(mixed), inf}, F());
        }
        default:
            break;
    }
    throw DomainError("unknown sub-case " + std::string(id));
}

}  // namespace

GeneratorSpec product_form_direct(const std::vector<ProductTerm>& terms, std::vector<LimitSet> limits, BaselineCdf f,
                                  std::vector<BaselineCdf> gs) {
    check_terms(terms);
    GeneratorSpec s{Form::Direct, mixed_product(terms, true), scaled_product(terms, false), std::move(limits),
                    std::move(f), std::move(gs)};
    check_structure(s);
    return s;
}

GeneratorSpec product_form_complementary(const std::vector<ProductTerm>& terms, std::vector<LimitSet> limits,
                                         BaselineCdf f, std::vector<BaselineCdf> gs) {
    check_terms(terms);
    GeneratorSpec s{Form::Complementary, scaled_product(terms, true), mixed_product(terms, false),
                    std::move(limits), std::move(f), std::move(gs)};
    check_structure(s);
    return s;
}

std::vector<std::string> subcase_ids() {
    std::vector<std::string> ids;
    for (int i = 1; i <= 22; ++i) ids.push_back(std::to_string(i) + "S1C1.2");
    for (int i = 13; i <= 22; ++i) ids.push_back(std::to_string(i) + "S1C1.3");
    return ids;
}

GeneratorSpec subcase(std::string_view id, const SubcaseBindings& bindings) {
    const auto pos = id.find("S1C1.");
    if (pos == std::string_view::npos || pos == 0 || pos + 6 != id.size()) {
        throw DomainError("unknown sub-case " + std::string(id));
    }
    int row = 0;
    for (char c : id.substr(0, pos)) {
        if (c < '0' || c > '9') throw DomainError("unknown sub-case " + std::string(id));
        row = row * 10 + (c - '0');
    }
    const char form = id.back();
    if (form == '2' && row >= 1 && row <= 22) return direct_row(id, bindings, row);
    if (form == '3' && row >= 13 && row <= 22) return complementary_row(id, bindings, row);
    throw DomainError("unknown sub-case " + std::string(id));
}

}  // namespace gencdf
