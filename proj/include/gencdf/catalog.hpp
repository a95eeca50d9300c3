#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gencdf/baseline.hpp"
#include "gencdf/generator.hpp"

namespace gencdf::catalog {

/// A generator recipe for an entry: the tabulated row it goes through and
/// the spec it builds for given parameters over one baseline G.
struct Route {
    std::string subcase;
    std::function<GeneratorSpec(const ParamList&, const BaselineCdf&)> build;
};

struct CatalogEntry {
    std::string name;
    std::string nomenclature;
    std::vector<std::string> params;
    /// Throws DomainError when a parameter is outside its domain.
    std::function<void(const ParamList&)> check;
    /// H as a function of g = G(x), from the literature formula.
    std::function<double(const ParamList&, double)> closed_form;
    std::vector<Route> routes;
    std::vector<ParamList> presets;
    /// Index into presets of the parameters at which H reduces to G.
    std::optional<std::size_t> degenerate;
};

std::vector<std::string> list_entries();

/// Throws DomainError("unknown entry ...") for names outside the catalog.
const CatalogEntry& entry(const std::string& name);

double closed_form_cdf(const CatalogEntry& e, const ParamList& params, const BaselineCdf& g, double x);

/// Points spread over the support of G: its finite ends, or the 1e-9 and
/// 1 - 1e-9 quantiles for infinite ones.
std::vector<double> support_grid(const BaselineCdf& g, std::size_t points);

/// max |H_route(x) - closed_form(x)| over support_grid(g, grid).
double reduction_residual(const CatalogEntry& e, const ParamList& params, const BaselineCdf& g, std::size_t grid,
                          std::size_t route = 0);

/// max |H_route(x) - H_0(x)| over the grid and every other route; 0 for
/// single-route entries.
double route_agreement(const CatalogEntry& e, const ParamList& params, const BaselineCdf& g, std::size_t grid);

/// Maps shared by the beta-type rows over m baselines:
///   l  = theta * prod (1 - G_i^alpha_i)^delta_i
///   mu = (1 - theta) * prod G_i^beta_i + theta
struct PowerProductMaps {
    double theta = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> delta;
};

/// Row 3S1C1.2 with the maps above as l_1 and mu_1.
GeneratorSpec power_product_lower_upper(const BaselineCdf& f, const PowerProductMaps& p,
                                        std::vector<BaselineCdf> gs);

/// Row 9S1C1.2 with m_1 = theta * prod G_i^beta_i and
/// nu_1 = (1 - theta) * prod (1 - G_i^alpha_i)^delta_i + theta.
GeneratorSpec power_product_second_sum(const BaselineCdf& f, const PowerProductMaps& p,
                                       std::vector<BaselineCdf> gs);

}  // namespace gencdf::catalog
