#include "gencdf/catalog.hpp"

#include <algorithm>
#include <cmath>

#include "gencdf/errors.hpp"
#include "gencdf/numerics.hpp"

namespace gencdf::catalog {

namespace {

using dsl::MonotoneExpr;

double get(const ParamList& p, const std::string& name) {
    for (const auto& [k, v] : p) {
        if (k == name) return v;
    }
    throw DomainError("missing parameter '" + name + "'");
}

std::function<void(const ParamList&)> positive(std::vector<std::string> names) {
    return [names](const ParamList& p) {
        for (const auto& n : names) {
            const double v = get(p, n);
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("parameter " + n + " must be positive and finite");
        }
    };
}

MonotoneExpr g1() { return dsl::var(1, 1); }
MonotoneExpr zero() { return dsl::constant(0.0, 1); }
MonotoneExpr one() { return dsl::constant(1.0, 1); }
MonotoneExpr expr(const std::string& text) { return dsl::parse(text, 1); }

std::string num(double v) { return format_real(v); }

GeneratorSpec upper_route(const BaselineCdf& f, const MonotoneExpr& mu, const BaselineCdf& g) {
    SubcaseBindings b;
    b.upper = mu;
    b.lower = zero();
    b.baseline_f = f;
    b.baselines_g = {g};
    return subcase("3S1C1.2", b);
}

GeneratorSpec second_sum_route(const BaselineCdf& f, const MonotoneExpr& mm, const MonotoneExpr& nu,
                               const BaselineCdf& g) {
    SubcaseBindings b;
    b.m_lower = mm;
    b.v_upper = nu;
    b.baseline_f = f;
    b.baselines_g = {g};
    return subcase("9S1C1.2", b);
}

GeneratorSpec slope_route(const std::string& id, const MonotoneExpr& map, const BaselineCdf& g) {
    SubcaseBindings b;
    if (id == "5S1C1.2") b.upper = map;
    if (id == "6S1C1.2") b.lower = map;
    if (id == "12S1C1.2") b.m_lower = map;
    b.baselines_g = {g};
    return subcase(id, b);
}

// H as a function of F over the maps mu = g^c (3S) and m = g^c, nu = 1 (9S).
std::vector<Route> beta_type_routes(std::function<BaselineCdf(const ParamList&)> f,
                                    std::function<MonotoneExpr(const ParamList&)> map) {
    return {
        Route{"3S1C1.2", [f, map](const ParamList& p, const BaselineCdf& g) { return upper_route(f(p), map(p), g); }},
        Route{"9S1C1.2",
              [f, map](const ParamList& p, const BaselineCdf& g) {
                  return second_sum_route(f(p), map(p), one(), g);
              }},
    };
}

double kummer_series(double g, double a, double b, double c) {
    // int_0^g t^{a-1} (1-t)^{b-1} e^{-ct} dt = sum_k (-c)^k / k! B(a+k, b) I_g(a+k, b)
    double num = 0.0, den = 0.0;
    double coef = 1.0;
    for (int k = 0; k < 400; ++k) {
        const double beta = std::exp(numerics::log_beta(a + k, b));
        const double full = coef * beta;
        den += full;
        num += full * numerics::regularized_incomplete_beta(g, a + k, b);
        if (std::fabs(full) < 1e-18 * std::fabs(den) && k > 2) break;
        coef *= -c / (k + 1);
    }
    return num / den;
}

std::vector<CatalogEntry> build_entries() {
    std::vector<CatalogEntry> out;

    out.push_back({"exponentiated_g", "exponentiated generalized (Mudholkar et al.)", {"a"}, positive({"a"}),
                   [](const ParamList& p, double g) { return std::pow(g, get(p, "a")); },
                   {},
                   {{{"a", 1.0}}, {{"a", 2.0}}, {{"a", 0.5}}, {{"a", 3.0}}},
                   0});
    out.back().routes = beta_type_routes([](const ParamList& p) { return make_power(get(p, "a")); },
                                         [](const ParamList&) { return g1(); });
    out.back().routes.push_back(Route{"5S1C1.2", [](const ParamList& p, const BaselineCdf& g) {
                                          return slope_route("5S1C1.2", dsl::power(g1(), get(p, "a")), g);
                                      }});

    out.push_back({"beta1_g", "beta1 generalized (Eugene et al.)", {"a", "b"}, positive({"a", "b"}),
                   [](const ParamList& p, double g) {
                       return numerics::regularized_incomplete_beta(g, get(p, "a"), get(p, "b"));
                   },
                   beta_type_routes([](const ParamList& p) { return make_beta(get(p, "a"), get(p, "b")); },
                                    [](const ParamList&) { return g1(); }),
                   {{{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}, {"b", 2.0}}, {{"a", 0.5}, {"b", 3.0}},
                    {{"a", 3.0}, {"b", 0.5}}},
                   0});

    out.push_back({"mc1_g", "Mc1 generalized (McDonald)", {"a", "b", "c"}, positive({"a", "b", "c"}),
                   [](const ParamList& p, double g) {
                       return numerics::regularized_incomplete_beta(std::pow(g, get(p, "c")), get(p, "a"),
                                                                    get(p, "b"));
                   },
                   beta_type_routes([](const ParamList& p) { return make_beta(get(p, "a"), get(p, "b")); },
                                    [](const ParamList& p) { return dsl::power(g1(), get(p, "c")); }),
                   {{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}}, {{"a", 2.0}, {"b", 2.0}, {"c", 2.0}},
                    {{"a", 0.5}, {"b", 3.0}, {"c", 1.5}}},
                   0});

    auto beta3_closed = [](double a, double b, double w) {
        return numerics::regularized_incomplete_beta(2.0 * w / (1.0 + w), a, b);
    };
    out.push_back({"beta3_g", "beta3 generalized (Thair and Nadarajah)", {"a", "b"}, positive({"a", "b"}),
                   [beta3_closed](const ParamList& p, double g) { return beta3_closed(get(p, "a"), get(p, "b"), g); },
                   beta_type_routes([](const ParamList& p) { return make_beta3_unit(get(p, "a"), get(p, "b")); },
                                    [](const ParamList&) { return g1(); }),
                   {{{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}, {"b", 2.0}}, {{"a", 0.5}, {"b", 3.0}}},
                   std::nullopt});

    out.push_back({"mc3_g", "Mc3 generalized (Thair and Nadarajah)", {"a", "b", "c"}, positive({"a", "b", "c"}),
                   [beta3_closed](const ParamList& p, double g) {
                       return beta3_closed(get(p, "a"), get(p, "b"), std::pow(g, get(p, "c")));
                   },
                   beta_type_routes([](const ParamList& p) { return make_beta3_unit(get(p, "a"), get(p, "b")); },
                                    [](const ParamList& p) { return dsl::power(g1(), get(p, "c")); }),
                   {{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}}, {{"a", 2.0}, {"b", 2.0}, {"c", 2.0}},
                    {{"a", 0.5}, {"b", 3.0}, {"c", 1.5}}},
                   std::nullopt});

    out.push_back({"kumaraswamy_g", "Kumaraswamy G1 (Cordeiro and Castro)", {"a", "b"}, positive({"a", "b"}),
                   [](const ParamList& p, double g) {
                       return 1.0 - std::pow(1.0 - std::pow(g, get(p, "a")), get(p, "b"));
                   },
                   beta_type_routes(
                       [](const ParamList& p) { return make_kumaraswamy_kernel(get(p, "a"), get(p, "b")); },
                       [](const ParamList&) { return g1(); }),
                   {{{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}, {"b", 3.0}}, {{"a", 0.5}, {"b", 2.0}}},
                   0});
    out.back().routes.push_back(Route{"6S1C1.2", [](const ParamList& p, const BaselineCdf& g) {
                                          const auto l = dsl::power(dsl::complement(dsl::power(g1(), get(p, "a"))),
                                                                    get(p, "b"));
                                          return slope_route("6S1C1.2", l, g);
                                      }});

    out.push_back({"kumaraswamy_g_type2", "Kumaraswamy type 2 (Thair and Nadarajah)", {"a", "b"},
                   positive({"a", "b"}),
                   [](const ParamList& p, double g) {
                       return std::pow(1.0 - std::pow(1.0 - g, get(p, "a")), get(p, "b"));
                   },
                   beta_type_routes([](const ParamList& p) { return make_power(get(p, "b")); },
                                    [](const ParamList& p) {
                                        return dsl::complement(dsl::power(dsl::complement(g1()), get(p, "a")));
                                    }),
                   {{{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}, {"b", 3.0}}, {{"a", 0.5}, {"b", 2.0}}},
                   0});

    auto mo_upper = [](const ParamList& p) {
        return expr("(g1/(g1 + " + num(get(p, "b")) + "*(1 - g1)))^" + num(get(p, "theta")));
    };
    auto mo_second = [](const ParamList& p) {
        const std::string r = num(get(p, "b")) + "*(1 - g1)";
        return expr("(" + r + "/(" + r + " + g1))^" + num(get(p, "theta")));
    };
    auto with_theta = [](const ParamList& p) {
        ParamList q = p;
        q.emplace_back("theta", 1.0);
        return q;
    };

    out.push_back({"marshall_olkin", "Marshall-Olkin (Marshall and Olkin)", {"b"}, positive({"b"}),
                   [](const ParamList& p, double g) {
                       const double b = get(p, "b");
                       return g / (g + b * (1.0 - g));
                   },
                   {Route{"5S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              return slope_route("5S1C1.2", mo_upper(with_theta(p)), g);
                          }},
                    Route{"12S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              return slope_route("12S1C1.2", mo_second(with_theta(p)), g);
                          }}},
                   {{{"b", 1.0}}, {{"b", 2.0}}, {{"b", 0.3}}},
                   0});

    out.push_back({"marshall_olkin_g1_jayakumar", "Marshall-Olkin G1 (Jayakumar and Mathew)", {"b", "theta"},
                   positive({"b", "theta"}),
                   [](const ParamList& p, double g) {
                       const double b = get(p, "b");
                       return 1.0 - std::pow(b * (1.0 - g) / (g + b * (1.0 - g)), get(p, "theta"));
                   },
                   {Route{"12S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              return slope_route("12S1C1.2", mo_second(p), g);
                          }}},
                   {{{"b", 1.0}, {"theta", 1.0}}, {{"b", 2.0}, {"theta", 2.0}}, {{"b", 0.3}, {"theta", 0.5}}},
                   0});

    out.push_back({"marshall_olkin_g1_tahir", "Marshall-Olkin G1 (Thair and Nadarajah)", {"b", "theta"},
                   positive({"b", "theta"}),
                   [](const ParamList& p, double g) {
                       const double b = get(p, "b");
                       return std::pow(g / (g + b * (1.0 - g)), get(p, "theta"));
                   },
                   {Route{"5S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              return slope_route("5S1C1.2", mo_upper(p), g);
                          }}},
                   {{{"b", 1.0}, {"theta", 1.0}}, {{"b", 2.0}, {"theta", 2.0}}, {{"b", 0.3}, {"theta", 0.5}}},
                   0});

    auto gamma_f = [](const ParamList& p) { return make_gamma(get(p, "a"), get(p, "b")); };
    out.push_back({"gamma_generated_zografos", "gamma-generated (Zografos and Balakrishnan)", {"a", "b"},
                   positive({"a", "b"}),
                   [](const ParamList& p, double g) {
                       return numerics::regularized_lower_gamma(-std::log1p(-g), get(p, "a"), get(p, "b"));
                   },
                   {Route{"3S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              return upper_route(gamma_f(p), dsl::neg_log_complement(g1()), g);
                          }}},
                   {{{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}, {"b", 1.5}}, {{"a", 0.5}, {"b", 3.0}}},
                   0});

    out.push_back({"gamma_generated_cordeiro", "gamma-generated (Cordeiro)", {"a", "b"}, positive({"a", "b"}),
                   [](const ParamList& p, double g) {
                       return 1.0 - numerics::regularized_lower_gamma(-std::log(g), get(p, "a"), get(p, "b"));
                   },
                   {Route{"9S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              return second_sum_route(gamma_f(p), zero(), dsl::neg_log(g1()), g);
                          }}},
                   {{{"a", 1.0}, {"b", 1.0}}, {{"a", 2.0}, {"b", 1.5}}, {{"a", 0.5}, {"b", 3.0}}},
                   0});

    out.push_back({"gamma_g_silva", "gamma-G (Silva)", {"a", "b", "beta", "gamma"},
                   positive({"a", "b", "beta", "gamma"}),
                   [](const ParamList& p, double g) {
                       const double inner = 1.0 - std::pow(1.0 - std::pow(g, get(p, "beta")), get(p, "gamma"));
                       return 1.0 - numerics::regularized_lower_gamma(-std::log(inner), get(p, "a"), get(p, "b"));
                   },
                   {Route{"9S1C1.2",
                          [=](const ParamList& p, const BaselineCdf& g) {
                              const auto inner = dsl::complement(dsl::power(
                                  dsl::complement(dsl::power(g1(), get(p, "beta"))), get(p, "gamma")));
                              return second_sum_route(gamma_f(p), zero(), dsl::neg_log(inner), g);
                          }}},
                   {{{"a", 1.0}, {"b", 1.0}, {"beta", 1.0}, {"gamma", 1.0}},
                    {{"a", 2.0}, {"b", 1.5}, {"beta", 1.0}, {"gamma", 1.0}},
                    {{"a", 0.5}, {"b", 3.0}, {"beta", 2.0}, {"gamma", 0.5}}},
                   0});

    out.push_back({"kummer_beta_g", "Kummer beta generalized (Pescim et al.)", {"a", "b", "c"},
                   [](const ParamList& p) {
                       positive({"a", "b"})(p);
                       if (!std::isfinite(get(p, "c"))) throw DomainError("parameter c must be finite");
                   },
                   [](const ParamList& p, double g) { return kummer_series(g, get(p, "a"), get(p, "b"), get(p, "c")); },
                   beta_type_routes(
                       [](const ParamList& p) { return make_kummer_beta(get(p, "a"), get(p, "b"), get(p, "c")); },
                       [](const ParamList&) { return g1(); }),
                   {{{"a", 1.0}, {"b", 1.0}, {"c", 0.0}}, {{"a", 2.0}, {"b", 3.0}, {"c", 1.0}},
                    {{"a", 0.5}, {"b", 2.0}, {"c", -1.0}}, {{"a", 2.0}, {"b", 2.0}, {"c", 3.0}}},
                   0});

    out.push_back({"kumaraswamy_g_poisson", "Kumaraswamy-G Poisson (Ramos)", {"lambda"}, positive({"lambda"}),
                   [](const ParamList& p, double g) {
                       const double l = get(p, "lambda");
                       return -std::expm1(-l * g) / -std::expm1(-l);
                   },
                   {Route{"12S1C1.2",
                          [](const ParamList& p, const BaselineCdf& g) {
                              return slope_route("12S1C1.2", dsl::exp_neg(dsl::scale(g1(), get(p, "lambda"))), g);
                          }}},
                   {{{"lambda", 1.0}}, {{"lambda", 2.5}}, {{"lambda", 0.3}}},
                   std::nullopt});

    return out;
}

const std::vector<CatalogEntry>& entries() {
    static const std::vector<CatalogEntry> all = build_entries();
    return all;
}

double max_gap(const std::vector<double>& xs, const std::function<double(double)>& a,
               const std::function<double(double)>& b) {
    double worst = 0.0;
    for (double x : xs) worst = std::max(worst, std::fabs(a(x) - b(x)));
    return worst;
}

MonotoneExpr product_of(std::vector<MonotoneExpr> factors, std::size_t m) {
    if (factors.empty()) return dsl::constant(1.0, m);
    return dsl::product(factors);
}

void check_maps(const PowerProductMaps& p, std::size_t m) {
    if (p.alpha.size() != m || p.beta.size() != m || p.delta.size() != m) {
        throw DomainError("power-product maps need one alpha, beta and delta per baseline");
    }
    if (!(p.theta >= 0.0 && p.theta <= 1.0)) throw DomainError("theta must lie in [0, 1]");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(p.alpha[i] > 0.0 && p.beta[i] > 0.0 && p.delta[i] > 0.0)) {
            throw DomainError("power-product exponents must be positive");
        }
    }
}

// prod G_i^beta_i and prod (1 - G_i^alpha_i)^delta_i
std::pair<MonotoneExpr, MonotoneExpr> power_products(const PowerProductMaps& p, std::size_t m) {
    std::vector<MonotoneExpr> up, down;
    for (std::size_t i = 0; i < m; ++i) {
        up.push_back(dsl::power(dsl::var(i + 1, m), p.beta[i]));
        down.push_back(dsl::power(dsl::complement(dsl::power(dsl::var(i + 1, m), p.alpha[i])), p.delta[i]));
    }
    return {product_of(up, m), product_of(down, m)};
}

}  // namespace

std::vector<std::string> list_entries() {
    std::vector<std::string> names;
    for (const auto& e : entries()) names.push_back(e.name);
    return names;
}

const CatalogEntry& entry(const std::string& name) {
    for (const auto& e : entries()) {
        if (e.name == name) return e;
    }
    throw DomainError("unknown entry '" + name + "'");
}

double closed_form_cdf(const CatalogEntry& e, const ParamList& params, const BaselineCdf& g, double x) {
    e.check(params);
    return std::clamp(e.closed_form(params, g.eval(x)), 0.0, 1.0);
}

std::vector<double> support_grid(const BaselineCdf& g, std::size_t points) {
    const double lo = g.support_lo().is_finite() ? g.support_lo().raw() : baseline_quantile(g, 1e-9);
    const double hi = g.support_hi().is_finite() ? g.support_hi().raw() : baseline_quantile(g, 1.0 - 1e-9);
    const std::size_t n = std::max<std::size_t>(points, 2);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return xs;
}

double reduction_residual(const CatalogEntry& e, const ParamList& params, const BaselineCdf& g, std::size_t grid,
                          std::size_t route) {
    e.check(params);
    if (route >= e.routes.size()) throw DomainError("entry " + e.name + " has no route " + std::to_string(route));
    const auto h = build(e.routes[route].build(params, g));
    return max_gap(
        support_grid(g, grid), [&](double x) { return h.eval_cdf(x); },
        [&](double x) { return closed_form_cdf(e, params, g, x); });
}

double route_agreement(const CatalogEntry& e, const ParamList& params, const BaselineCdf& g, std::size_t grid) {
    e.check(params);
    if (e.routes.size() < 2) return 0.0;
    const auto xs = support_grid(g, grid);
    const auto first = build(e.routes[0].build(params, g));
    double worst = 0.0;
    for (std::size_t r = 1; r < e.routes.size(); ++r) {
        const auto other = build(e.routes[r].build(params, g));
        worst = std::max(worst, max_gap(
                                    xs, [&](double x) { return first.eval_cdf(x); },
                                    [&](double x) { return other.eval_cdf(x); }));
    }
    return worst;
}

GeneratorSpec power_product_lower_upper(const BaselineCdf& f, const PowerProductMaps& p,
                                        std::vector<BaselineCdf> gs) {
    const std::size_t m = gs.size();
    check_maps(p, m);
    const auto [up, down] = power_products(p, m);
    SubcaseBindings b;
    b.upper = dsl::affine_mix(up, p.theta);
    b.lower = dsl::scale(down, p.theta);
    b.baseline_f = f;
    b.baselines_g = std::move(gs);
    return subcase("3S1C1.2", b);
}

GeneratorSpec power_product_second_sum(const BaselineCdf& f, const PowerProductMaps& p,
                                       std::vector<BaselineCdf> gs) {
    const std::size_t m = gs.size();
    check_maps(p, m);
    const auto [up, down] = power_products(p, m);
    SubcaseBindings b;
    b.m_lower = dsl::scale(up, p.theta);
    b.v_upper = dsl::affine_mix(down, p.theta);
    b.baseline_f = f;
    b.baselines_g = std::move(gs);
    return subcase("9S1C1.2", b);
}

}  // namespace gencdf::catalog
