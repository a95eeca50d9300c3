#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gencdf/baseline.hpp"
#include "gencdf/dsl.hpp"
#include "gencdf/numerics.hpp"

namespace gencdf {

enum class Form { Direct, Complementary };

const char* to_string(Form form);

inline constexpr std::size_t kMaxTerms = 64;

/// One integral term j: the integration limits of both sums.
struct LimitSet {
    dsl::MonotoneExpr upper;    // mu_j
    dsl::MonotoneExpr lower;    // l_j
    dsl::MonotoneExpr m_lower;  // m_j
    dsl::MonotoneExpr v_upper;  // nu_j
};

/// Direct form:        H = U * sum_j [F(mu_j) - F(l_j)] - V * sum_j [F(nu_j) - F(m_j)]
/// Complementary form: H = 1 - V * sum_j [F(nu_j) - F(m_j)] + U * sum_j [F(mu_j) - F(l_j)]
/// with every map evaluated at (G_1(x), ..., G_m(x)).
struct GeneratorSpec {
    Form form;
    dsl::MonotoneExpr scale_u;
    dsl::MonotoneExpr scale_v;
    std::vector<LimitSet> limits;
    BaselineCdf baseline_f;
    std::vector<BaselineCdf> baselines_g;

    std::size_t n() const { return limits.size(); }
    std::size_t m() const { return baselines_g.size(); }
};

/// Throws DomainError unless the spec is structurally sound (sizes, arities).
void check_structure(const GeneratorSpec& spec);

enum class Status { Pass, Fail, NotApplicable };

const char* to_string(Status s);

struct Verdict {
    std::string id;  // "d1".."d10" or "cd1".."cd10"
    Status status;
    std::string witness;
};

struct ValidationReport {
    std::vector<Verdict> verdicts;

    bool passed() const;
    std::vector<std::string> failed_ids() const;
    const Verdict& at(std::string_view id) const;
};

ValidationReport validate(const GeneratorSpec& spec);

struct DensityValue {
    double value;
    bool finite_difference;  // true when a symbolic partial was unavailable
};

class GeneratedCdf {
public:
    /// H(x), clamped to [0, 1] after a 1e-12 slack; larger excursions raise
    /// IntegrityError. x may be +-inf.
    double eval_cdf(double x) const;

    /// H before clamping, as a function of the baseline values g = G(x).
    double eval_from_g(std::span<const double> g) const;

    DensityValue eval_density(double x) const;

    /// Deterministic for a given seed.
    std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

    const GeneratorSpec& spec() const { return spec_; }
    const numerics::Tolerances& tolerances() const { return tol_; }

private:
    friend GeneratedCdf build(const GeneratorSpec&, const numerics::Tolerances&);
    GeneratedCdf(GeneratorSpec spec, numerics::Tolerances tol) : spec_(std::move(spec)), tol_(tol) {}

    std::vector<double> baseline_values(double x) const;
    double density_by_chain_rule(double x, bool& ok) const;
    double density_by_difference(double x) const;

    GeneratorSpec spec_;
    numerics::Tolerances tol_;
};

/// Refuses specs that fail validation (DomainError listing the failed ids).
GeneratedCdf build(const GeneratorSpec& spec, const numerics::Tolerances& tol = numerics::Tolerances{});

/// Direct-form spec with n = 1, F uniform on [0, 1], l_1 = 0, U = 1, V = 0
/// and mu_1 = H itself, so that the result reproduces H pointwise.
GeneratorSpec rewrap_as_uniform(const GeneratedCdf& h);

// ---------------------------------------------------------------------------
// Product-form constructors

struct ProductTerm {
    dsl::MonotoneExpr u;  // nondecreasing, u(0..0) = 0, u(1..1) = 1
    dsl::MonotoneExpr v;  // nonincreasing, v(0..0) = 1, v(1..1) = 0
    double theta;         // in [0, 1]
    double alpha;         // >= 0
};

/// U = prod ((1 - theta_i) u_i + theta_i)^alpha_i, V = prod (theta_i v_i)^alpha_i.
GeneratorSpec product_form_direct(const std::vector<ProductTerm>& terms, std::vector<LimitSet> limits,
                                  BaselineCdf f, std::vector<BaselineCdf> gs);

/// V = prod ((1 - theta_i) v_i + theta_i)^alpha_i, U = prod (theta_i u_i)^alpha_i.
GeneratorSpec product_form_complementary(const std::vector<ProductTerm>& terms, std::vector<LimitSet> limits,
                                         BaselineCdf f, std::vector<BaselineCdf> gs);

// ---------------------------------------------------------------------------
// Tabulated sub-cases

/// Free slots of a tabulated row. Only the slots a row needs are read;
/// missing required slots raise DomainError naming the slot.
struct SubcaseBindings {
    std::optional<dsl::MonotoneExpr> upper;    // mu_1
    std::optional<dsl::MonotoneExpr> lower;    // l_1
    std::optional<dsl::MonotoneExpr> m_lower;  // m_1
    std::optional<dsl::MonotoneExpr> v_upper;  // nu_1
    std::vector<LimitSet> limits;              // rows over general n
    std::vector<ProductTerm> products;         // the k product factors
    // Rows 15-20: one-variable maps composed with u_{k+1}, v_{k+1}.
    std::optional<dsl::MonotoneExpr> mu_map;
    std::optional<dsl::MonotoneExpr> ell_map;
    std::optional<dsl::MonotoneExpr> nu_map;
    std::optional<dsl::MonotoneExpr> m_map;
    std::optional<dsl::MonotoneExpr> u_extra;
    std::optional<dsl::MonotoneExpr> v_extra;
    std::optional<double> gamma;
    std::optional<BaselineCdf> baseline_f;  // ignored by the uniform-slope rows
    std::vector<BaselineCdf> baselines_g;
};

/// Ids "1S1C1.2".."22S1C1.2" and "13S1C1.3".."22S1C1.3".
std::vector<std::string> subcase_ids();

GeneratorSpec subcase(std::string_view id, const SubcaseBindings& bindings);

}  // namespace gencdf
