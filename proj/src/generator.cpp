#include "gencdf/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gencdf/errors.hpp"

namespace gencdf {

namespace {

using dsl::Monotonicity;
using dsl::MonotoneExpr;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

std::string fmt(ExtReal v) { return v.to_string(); }

ExtReal at_zero(const MonotoneExpr& e) { return e.corner_values().first; }
ExtReal at_one(const MonotoneExpr& e) { return e.corner_values().second; }

// Limits only enter through F, so two limits are interchangeable when
// F takes the same value at both.
bool f_equal(const BaselineCdf& f, ExtReal a, ExtReal b) {
    return approx_equal(a, b, kTol) || std::abs(f.eval(a) - f.eval(b)) <= kTol;
}

bool f_less_equal(const BaselineCdf& f, ExtReal a, ExtReal b) {
    if (a <= b) return true;
    if (a.is_finite() && b.is_finite() && a.raw() <= b.raw() + kTol) return true;
    return f.eval(a) <= f.eval(b) + kTol;
}

bool near(ExtReal a, double b) { return a.is_finite() && std::abs(a.raw() - b) <= kTol; }

Verdict pass(std::string id, std::string witness) { return {std::move(id), Status::Pass, std::move(witness)}; }
Verdict fail(std::string id, std::string witness) { return {std::move(id), Status::Fail, std::move(witness)}; }

std::string jname(const char* name, std::size_t j) { return std::string(name) + "_" + std::to_string(j + 1); }

// 9^min(m,3) lattice of [0,1]^m; coordinates beyond the third reuse the
// digits cyclically.
std::vector<std::vector<double>> lattice(std::size_t m) {
    const std::size_t d = std::min<std::size_t>(m, 3);
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= 9;
    std::vector<std::vector<double>> points;
    points.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<std::size_t> digits(d);
        std::size_t r = idx;
        for (std::size_t i = 0; i < d; ++i) {
            digits[i] = r % 9;
            r /= 9;
        }
        std::vector<double> p(m);
        for (std::size_t z = 0; z < m; ++z) p[z] = static_cast<double>(digits[z % d]) / 8.0;
        points.push_back(std::move(p));
    }
    return points;
}

Verdict check_nonnegative(const std::string& id, const GeneratorSpec& s) {
    for (const auto& p : lattice(s.m())) {
        for (const auto* e : {&s.scale_u, &s.scale_v}) {
            const ExtReal v = e->eval(p);
            const char* name = e == &s.scale_u ? "U" : "V";
            if (!v.is_finite()) return fail(id, std::string(name) + " is not finite on the lattice");
            if (v.raw() < -kTol) {
                std::ostringstream w;
                w << name << " = " << format_real(v.raw()) << " < 0 at (";
                for (std::size_t i = 0; i < p.size(); ++i) w << (i ? ", " : "") << format_real(p[i]);
                w << ")";
                return fail(id, w.str());
            }
        }
    }
    return pass(id, "U, V >= 0 on " + std::to_string(lattice(s.m()).size()) + " lattice points");
}

bool direction_ok(const MonotoneExpr& e, bool nondecreasing, std::string& bad) {
    const auto dirs = e.infer_direction();
    for (std::size_t z = 0; z < dirs.size(); ++z) {
        const auto k = dirs[z].kind;
        const bool ok = k == Monotonicity::Constant ||
                        k == (nondecreasing ? Monotonicity::Nondecreasing : Monotonicity::Nonincreasing);
        if (!ok) {
            bad = std::string(dsl::to_string(k)) + " in g" + std::to_string(z + 1);
            return false;
        }
    }
    return true;
}

Verdict check_directions(const std::string& id, const GeneratorSpec& s) {
    std::string bad;
    auto check = [&](const MonotoneExpr& e, bool up, const std::string& name) -> std::optional<Verdict> {
        if (!direction_ok(e, up, bad)) {
            return fail(id, name + " must be " + (up ? "nondecreasing" : "nonincreasing") + ", inferred " + bad);
        }
        return std::nullopt;
    };
    if (auto v = check(s.scale_u, true, "U")) return *v;
    if (auto v = check(s.scale_v, false, "V")) return *v;
    for (std::size_t j = 0; j < s.n(); ++j) {
        const auto& l = s.limits[j];
        if (auto v = check(l.upper, true, jname("mu", j))) return *v;
        if (auto v = check(l.m_lower, true, jname("m", j))) return *v;
        if (auto v = check(l.lower, false, jname("l", j))) return *v;
        if (auto v = check(l.v_upper, false, jname("nu", j))) return *v;
    }
    return pass(id, "U, mu, m nondecreasing; V, l, nu nonincreasing");
}

// "l_j(0) = mu_j(0) for all j", with the first offending j reported.
bool all_equal(const BaselineCdf& f, const GeneratorSpec& s, bool at_one_corner,
               const dsl::MonotoneExpr LimitSet::*a, const dsl::MonotoneExpr LimitSet::*b, const char* an,
               const char* bn, std::string& witness) {
    for (std::size_t j = 0; j < s.n(); ++j) {
        const auto& l = s.limits[j];
        const ExtReal x = at_one_corner ? at_one(l.*a) : at_zero(l.*a);
        const ExtReal y = at_one_corner ? at_one(l.*b) : at_zero(l.*b);
        if (!f_equal(f, x, y)) {
            witness = jname(an, j) + " = " + fmt(x) + " but " + jname(bn, j) + " = " + fmt(y);
            return false;
        }
    }
    return true;
}

Verdict check_discontinuities(const std::string& id, const GeneratorSpec& s) {
    const BaselineCdf& f = s.baseline_f;
    if (!f.is_discrete()) return pass(id, "F has no discontinuities");
    const auto& jumps = f.jumps();
    auto hits_jump = [&](ExtReal v) -> std::optional<double> {
        if (!v.is_finite()) return std::nullopt;
        for (const auto& jp : jumps) {
            if (std::abs(v.raw() - jp.location) <= kTol) return jp.location;
        }
        return std::nullopt;
    };
    for (std::size_t j = 0; j < s.n(); ++j) {
        const auto& l = s.limits[j];
        const std::pair<const MonotoneExpr*, const char*> maps[] = {
            {&l.lower, "l"}, {&l.upper, "mu"}, {&l.m_lower, "m"}, {&l.v_upper, "nu"}};
        for (const auto& [e, name] : maps) {
            const auto [c0, c1] = e->corner_values();
            for (const auto& [c, corner] : {std::pair{c0, "(0..0)"}, std::pair{c1, "(1..1)"}}) {
                if (auto jp = hits_jump(c)) {
                    return fail(id, jname(name, j) + corner + " = " + fmt(c) + " is a jump of F");
                }
            }
        }
        // l_j and nu_j must stay constant just right of any point they map
        // onto a jump; sampled along the diagonal of the cube.
        for (const auto& [e, name] : {std::pair{&l.lower, "l"}, std::pair{&l.v_upper, "nu"}}) {
            if (e->is_constant()) continue;
            auto diag = [&](double t) { return e->eval(std::vector<double>(s.m(), t)); };
            const ExtReal hi = diag(0.0);
            const ExtReal lo = diag(1.0);
            for (const auto& jp : jumps) {
                const ExtReal J(jp.location);
                if (!(lo < J && J < hi)) continue;
                double a = 0.0, b = 1.0;  // diag(a) > J >= diag(b)
                for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
                    const double mid = 0.5 * (a + b);
                    (diag(mid) > J ? a : b) = mid;
                }
                const ExtReal base = diag(b);
                for (int k = 1; k <= 10; ++k) {
                    const double t = std::min(1.0, b + 1e-4 * k);
                    if (!approx_equal(diag(t), base, kTol)) {
                        return fail(id, jname(name, j) + " is not constant right of its preimage of jump " +
                                            format_real(jp.location));
                    }
                }
            }
        }
    }
    return pass(id, "no limit corner value is a jump of F; l, nu constant near jump preimages");
}

ValidationReport validate_direct(const GeneratorSpec& s) {
    const BaselineCdf& f = s.baseline_f;
    ValidationReport r;
    const ExtReal u0 = at_zero(s.scale_u), u1 = at_one(s.scale_u);
    const ExtReal v0 = at_zero(s.scale_v), v1 = at_one(s.scale_v);
    std::string w;

    r.verdicts.push_back(check_nonnegative("d1", s));
    r.verdicts.push_back(check_directions("d2", s));

    if (approx_equal(u0, v0, kTol)) {
        r.verdicts.push_back(pass("d3", "vacuous: U(0..0) = V(0..0) = " + fmt(u0)));
    } else {
        const bool first = near(u0, 0.0) || all_equal(f, s, false, &LimitSet::upper, &LimitSet::lower, "mu", "l", w);
        std::string w2;
        const bool second =
            near(v0, 0.0) || all_equal(f, s, false, &LimitSet::m_lower, &LimitSet::v_upper, "m", "nu", w2);
        if (!first) {
            r.verdicts.push_back(fail("d3", "U(0..0) = " + fmt(u0) + " != 0 and " + w));
        } else if (!second) {
            r.verdicts.push_back(fail("d3", "V(0..0) = " + fmt(v0) + " != 0 and " + w2));
        } else {
            r.verdicts.push_back(pass("d3", "U(0..0) = " + fmt(u0) + ", V(0..0) = " + fmt(v0)));
        }
    }

    if (approx_equal(u0, v0, kTol) && !near(u0, 0.0)) {
        std::string w2;
        if (!all_equal(f, s, false, &LimitSet::upper, &LimitSet::v_upper, "mu", "nu", w)) {
            r.verdicts.push_back(fail("d4", "U(0..0) = V(0..0) = " + fmt(u0) + " but " + w));
        } else if (!all_equal(f, s, false, &LimitSet::m_lower, &LimitSet::lower, "m", "l", w2)) {
            r.verdicts.push_back(fail("d4", "U(0..0) = V(0..0) = " + fmt(u0) + " but " + w2));
        } else {
            r.verdicts.push_back(pass("d4", "mu(0..0) = nu(0..0) and m(0..0) = l(0..0)"));
        }
    } else {
        r.verdicts.push_back(pass("d4", "vacuous"));
    }

    {
        std::optional<Verdict> bad;
        for (std::size_t j = 0; j < s.n() && !bad; ++j) {
            const auto& l = s.limits[j];
            if (!f_less_equal(f, at_zero(l.lower), at_zero(l.upper))) {
                bad = fail("d5", jname("l", j) + "(0..0) = " + fmt(at_zero(l.lower)) + " > " + jname("mu", j) +
                                     "(0..0) = " + fmt(at_zero(l.upper)));
            } else if (!near(v0, 0.0) && !f_less_equal(f, at_one(l.m_lower), at_one(l.v_upper))) {
                bad = fail("d5", jname("m", j) + "(1..1) = " + fmt(at_one(l.m_lower)) + " > " + jname("nu", j) +
                                     "(1..1) = " + fmt(at_one(l.v_upper)));
            }
        }
        r.verdicts.push_back(bad ? *bad : pass("d5", "l(0..0) <= mu(0..0) and m(1..1) <= nu(1..1)"));
    }

    {
        const ExtReal top = at_one(s.limits.back().upper);
        const ExtReal bottom = at_one(s.limits.front().lower);
        if (!(top >= f.support_hi() || near(top, f.support_hi().is_finite() ? f.support_hi().raw() : kInf))) {
            r.verdicts.push_back(fail("d6", "mu_n(1..1) = " + fmt(top) + " < sup{F < 1} = " + fmt(f.support_hi())));
        } else if (!(bottom <= f.support_lo() ||
                     near(bottom, f.support_lo().is_finite() ? f.support_lo().raw() : -kInf))) {
            r.verdicts.push_back(
                fail("d6", "l_1(1..1) = " + fmt(bottom) + " > inf{F > 0} = " + fmt(f.support_lo())));
        } else {
            r.verdicts.push_back(pass("d6", "mu_n(1..1) = " + fmt(top) + ", l_1(1..1) = " + fmt(bottom)));
        }
    }

    r.verdicts.push_back(near(u1, 1.0) ? pass("d7", "U(1..1) = 1") : fail("d7", "U(1..1) = " + fmt(u1) + " != 1"));

    if (near(v1, 0.0) || all_equal(f, s, true, &LimitSet::v_upper, &LimitSet::m_lower, "nu", "m", w)) {
        r.verdicts.push_back(pass("d8", "V(1..1) = " + fmt(v1)));
    } else {
        r.verdicts.push_back(fail("d8", "V(1..1) = " + fmt(v1) + " != 0 and " + w));
    }

    if (s.n() < 2) {
        r.verdicts.push_back({"d9", Status::NotApplicable, "n = 1"});
    } else {
        std::optional<Verdict> bad;
        for (std::size_t j = 0; j + 1 < s.n() && !bad; ++j) {
            const ExtReal a = at_one(s.limits[j].upper);
            const ExtReal b = at_one(s.limits[j + 1].lower);
            if (!f_equal(f, a, b)) {
                bad = fail("d9", jname("mu", j) + "(1..1) = " + fmt(a) + " != " + jname("l", j + 1) +
                                     "(1..1) = " + fmt(b));
            }
        }
        r.verdicts.push_back(bad ? *bad : pass("d9", "consecutive limits chain at (1..1)"));
    }

    r.verdicts.push_back(check_discontinuities("d10", s));
    return r;
}

ValidationReport validate_complementary(const GeneratorSpec& s) {
    const BaselineCdf& f = s.baseline_f;
    ValidationReport r;
    const ExtReal u0 = at_zero(s.scale_u), u1 = at_one(s.scale_u);
    const ExtReal v0 = at_zero(s.scale_v), v1 = at_one(s.scale_v);
    std::string w;

    r.verdicts.push_back(check_nonnegative("cd1", s));
    r.verdicts.push_back(check_directions("cd2", s));

    if (approx_equal(u1, v1, kTol)) {
        r.verdicts.push_back(pass("cd3", "vacuous: U(1..1) = V(1..1) = " + fmt(u1)));
    } else {
        std::string w2;
        const bool first =
            near(v1, 0.0) || all_equal(f, s, true, &LimitSet::m_lower, &LimitSet::v_upper, "m", "nu", w);
        const bool second = near(u1, 0.0) || all_equal(f, s, true, &LimitSet::lower, &LimitSet::upper, "l", "mu", w2);
        if (!first) {
            r.verdicts.push_back(fail("cd3", "V(1..1) = " + fmt(v1) + " != 0 and " + w));
        } else if (!second) {
            r.verdicts.push_back(fail("cd3", "U(1..1) = " + fmt(u1) + " != 0 and " + w2));
        } else {
            r.verdicts.push_back(pass("cd3", "U(1..1) = " + fmt(u1) + ", V(1..1) = " + fmt(v1)));
        }
    }

    if (approx_equal(u1, v1, kTol) && !near(u1, 0.0)) {
        std::string w2;
        if (!all_equal(f, s, true, &LimitSet::upper, &LimitSet::v_upper, "mu", "nu", w)) {
            r.verdicts.push_back(fail("cd4", "U(1..1) = V(1..1) = " + fmt(u1) + " but " + w));
        } else if (!all_equal(f, s, true, &LimitSet::m_lower, &LimitSet::lower, "m", "l", w2)) {
            r.verdicts.push_back(fail("cd4", "U(1..1) = V(1..1) = " + fmt(u1) + " but " + w2));
        } else {
            r.verdicts.push_back(pass("cd4", "mu(1..1) = nu(1..1) and m(1..1) = l(1..1)"));
        }
    } else {
        r.verdicts.push_back(pass("cd4", "vacuous"));
    }

    {
        std::optional<Verdict> bad;
        for (std::size_t j = 0; j < s.n() && !bad; ++j) {
            const auto& l = s.limits[j];
            if (!f_less_equal(f, at_zero(l.lower), at_zero(l.upper))) {
                bad = fail("cd5", jname("l", j) + "(0..0) = " + fmt(at_zero(l.lower)) + " > " + jname("mu", j) +
                                      "(0..0) = " + fmt(at_zero(l.upper)));
            } else if (!near(v1, 0.0) && !f_less_equal(f, at_one(l.m_lower), at_one(l.v_upper))) {
                bad = fail("cd5", jname("m", j) + "(1..1) = " + fmt(at_one(l.m_lower)) + " > " + jname("nu", j) +
                                      "(1..1) = " + fmt(at_one(l.v_upper)));
            }
        }
        r.verdicts.push_back(bad ? *bad : pass("cd5", "l(0..0) <= mu(0..0) and m(1..1) <= nu(1..1)"));
    }

    {
        const ExtReal top = at_zero(s.limits.back().v_upper);
        const ExtReal bottom = at_zero(s.limits.front().m_lower);
        if (!(top >= f.support_hi() || near(top, f.support_hi().is_finite() ? f.support_hi().raw() : kInf))) {
            r.verdicts.push_back(
                fail("cd6", "nu_eta(0..0) = " + fmt(top) + " < sup{F < 1} = " + fmt(f.support_hi())));
        } else if (!(bottom <= f.support_lo() ||
                     near(bottom, f.support_lo().is_finite() ? f.support_lo().raw() : -kInf))) {
            r.verdicts.push_back(
                fail("cd6", "m_1(0..0) = " + fmt(bottom) + " > inf{F > 0} = " + fmt(f.support_lo())));
        } else {
            r.verdicts.push_back(pass("cd6", "nu_eta(0..0) = " + fmt(top) + ", m_1(0..0) = " + fmt(bottom)));
        }
    }

    r.verdicts.push_back(near(v0, 1.0) ? pass("cd7", "V(0..0) = 1")
                                       : fail("cd7", "V(0..0) = " + fmt(v0) + " != 1"));

    if (near(u0, 0.0) || all_equal(f, s, false, &LimitSet::lower, &LimitSet::upper, "l", "mu", w)) {
        r.verdicts.push_back(pass("cd8", "U(0..0) = " + fmt(u0)));
    } else {
        r.verdicts.push_back(fail("cd8", "U(0..0) = " + fmt(u0) + " != 0 and " + w));
    }

    if (s.n() < 2) {
        r.verdicts.push_back({"cd9", Status::NotApplicable, "eta = 1"});
    } else {
        std::optional<Verdict> bad;
        for (std::size_t j = 0; j + 1 < s.n() && !bad; ++j) {
            const ExtReal a = at_zero(s.limits[j].v_upper);
            const ExtReal b = at_zero(s.limits[j + 1].m_lower);
            if (!f_equal(f, a, b)) {
                bad = fail("cd9", jname("nu", j) + "(0..0) = " + fmt(a) + " != " + jname("m", j + 1) +
                                      "(0..0) = " + fmt(b));
            }
        }
        r.verdicts.push_back(bad ? *bad : pass("cd9", "consecutive limits chain at (0..0)"));
    }

    r.verdicts.push_back(check_discontinuities("cd10", s));
    return r;
}

// F(hi) - F(lo), negative when the limits are reversed.
double oriented_mass(const BaselineCdf& f, double lo, double hi, const numerics::Tolerances& tol) {
    if (lo <= hi) return cdf_segment_mass(f, ExtReal(lo), ExtReal(hi), tol);
    return -cdf_segment_mass(f, ExtReal(hi), ExtReal(lo), tol);
}

bool is_one(const MonotoneExpr& e) {
    return e.is_constant() && e.root().kind == dsl::NodeKind::Const && e.root().param == 1.0;
}

}  // namespace

const char* to_string(Form form) { return form == Form::Direct ? "direct" : "complementary"; }

const char* to_string(Status s) {
    switch (s) {
        case Status::Pass:
            return "pass";
        case Status::Fail:
            return "fail";
        case Status::NotApplicable:
            return "n/a";
    }
    return "?";
}

bool ValidationReport::passed() const {
    return std::none_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.status == Status::Fail; });
}

std::vector<std::string> ValidationReport::failed_ids() const {
    std::vector<std::string> out;
    for (const auto& v : verdicts) {
        if (v.status == Status::Fail) out.push_back(v.id);
    }
    return out;
}

const Verdict& ValidationReport::at(std::string_view id) const {
    for (const auto& v : verdicts) {
        if (v.id == id) return v;
    }
    throw DomainError("no verdict '" + std::string(id) + "'");
}

void check_structure(const GeneratorSpec& s) {
    if (s.n() == 0) throw DomainError("spec needs at least one integral term");
    if (s.n() > kMaxTerms) throw DomainError("spec has more than 64 integral terms");
    if (s.m() == 0) throw DomainError("spec needs at least one baseline G");
    auto arity = [&](const MonotoneExpr& e, const std::string& name) {
        if (e.arity() != s.m()) {
            throw DomainError(name + " has arity " + std::to_string(e.arity()) + " but there are " +
                              std::to_string(s.m()) + " baselines");
        }
    };
    arity(s.scale_u, "U");
    arity(s.scale_v, "V");
    for (std::size_t j = 0; j < s.n(); ++j) {
        arity(s.limits[j].upper, jname("mu", j));
        arity(s.limits[j].lower, jname("l", j));
        arity(s.limits[j].m_lower, jname("m", j));
        arity(s.limits[j].v_upper, jname("nu", j));
    }
}

ValidationReport validate(const GeneratorSpec& spec) {
    check_structure(spec);
    return spec.form == Form::Direct ? validate_direct(spec) : validate_complementary(spec);
}

GeneratedCdf build(const GeneratorSpec& spec, const numerics::Tolerances& tol) {
    const auto report = validate(spec);
    if (!report.passed()) {
        std::string ids;
        for (const auto& id : report.failed_ids()) ids += (ids.empty() ? "" : ", ") + id;
        throw DomainError("spec fails validation: " + ids);
    }
    return GeneratedCdf(spec, tol);
}

std::vector<double> GeneratedCdf::baseline_values(double x) const {
    std::vector<double> g;
    g.reserve(spec_.m());
    for (const auto& b : spec_.baselines_g) g.push_back(b.eval(x));
    return g;
}

double GeneratedCdf::eval_from_g(std::span<const double> g) const {
    const BaselineCdf& f = spec_.baseline_f;
    const double u = spec_.scale_u.eval(g).raw();
    const double v = spec_.scale_v.eval(g).raw();
    double first = 0.0;
    double second = 0.0;
    for (const auto& l : spec_.limits) {
        if (u != 0.0) first += oriented_mass(f, l.lower.eval(g).raw(), l.upper.eval(g).raw(), tol_);
        if (v != 0.0) second += oriented_mass(f, l.m_lower.eval(g).raw(), l.v_upper.eval(g).raw(), tol_);
    }
    const double a = u == 0.0 ? 0.0 : u * first;
    const double b = v == 0.0 ? 0.0 : v * second;
    return spec_.form == Form::Direct ? a - b : 1.0 - b + a;
}

double GeneratedCdf::eval_cdf(double x) const {
    const auto g = baseline_values(x);
    const double h = eval_from_g(g);
    // Quadrature-backed F carries its own error into H.
    const double slack = kTol + (spec_.baseline_f.has_closed_form_cdf() ? 0.0 : 10.0 * tol_.quadrature);
    if (!(h >= -slack && h <= 1.0 + slack)) {
        throw IntegrityError("H(" + format_real(x) + ") = " + format_real17(h) + " lies outside [0, 1]");
    }
    return std::clamp(h, 0.0, 1.0);
}

double GeneratedCdf::density_by_difference(double x) const {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return std::max(0.0, (eval_cdf(x + h) - eval_cdf(x - h)) / (2.0 * h));
}

double GeneratedCdf::density_by_chain_rule(double x, bool& ok) const {
    const BaselineCdf& f = spec_.baseline_f;
    const auto g = baseline_values(x);
    const std::size_t m = spec_.m();

    auto value = [&](const MonotoneExpr& e) { return e.eval(g).raw(); };
    // d e / d g_z, or 0 where e is infinite (F is flat there).
    auto slope = [&](const MonotoneExpr& e, std::size_t z, double at) -> double {
        if (!std::isfinite(at)) return 0.0;
        const auto p = dsl::partial(e, z, g);
        if (!p.symbolic) ok = false;
        return p.value;
    };
    auto fdens = [&](double at, double d) -> double {
        if (d == 0.0 || !std::isfinite(at)) return 0.0;
        const double fv = f.density(at);
        if (!std::isfinite(fv)) ok = false;
        return fv * d;
    };

    const double u = value(spec_.scale_u);
    const double v = value(spec_.scale_v);
    double first = 0.0, second = 0.0;
    for (const auto& l : spec_.limits) {
        first += oriented_mass(f, value(l.lower), value(l.upper), tol_);
        second += oriented_mass(f, value(l.m_lower), value(l.v_upper), tol_);
    }

    double total = 0.0;
    for (std::size_t z = 1; z <= m; ++z) {
        const BaselineCdf& gz = spec_.baselines_g[z - 1];
        const double dens = gz.density(x);
        if (dens == 0.0) continue;
        if (!std::isfinite(dens)) {
            ok = false;
            return 0.0;
        }
        double a = slope(spec_.scale_u, z, u) * first;
        double b = slope(spec_.scale_v, z, v) * second;
        double inner_a = 0.0, inner_b = 0.0;
        for (const auto& l : spec_.limits) {
            const double mu = value(l.upper), lo = value(l.lower), nu = value(l.v_upper), mm = value(l.m_lower);
            inner_a += fdens(mu, slope(l.upper, z, mu)) - fdens(lo, slope(l.lower, z, lo));
            inner_b += fdens(nu, slope(l.v_upper, z, nu)) - fdens(mm, slope(l.m_lower, z, mm));
        }
        if (u != 0.0) a += u * inner_a;
        if (v != 0.0) b += v * inner_b;
        total += dens * (a - b);
    }
    if (!std::isfinite(total)) ok = false;
    return total;
}

DensityValue GeneratedCdf::eval_density(double x) const {
    if (spec_.baseline_f.is_discrete() || !spec_.baseline_f.has_density()) {
        throw DomainError("density needs a continuous F with a density");
    }
    for (const auto& g : spec_.baselines_g) {
        if (g.is_discrete() || !g.has_density()) throw DomainError("density needs continuous G with densities");
    }
    bool ok = true;
    double d = 0.0;
    try {
        d = density_by_chain_rule(x, ok);
    } catch (const DomainError&) {
        ok = false;
    }
    if (ok) return {std::max(d, 0.0), false};
    return {density_by_difference(x), true};
}

std::vector<double> GeneratedCdf::sample(std::size_t count, std::uint64_t seed) const {
    std::vector<double> out;
    if (count == 0) return out;
    out.reserve(count);
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };

    const bool all_g_discrete = std::all_of(spec_.baselines_g.begin(), spec_.baselines_g.end(),
                                            [](const BaselineCdf& g) { return g.is_discrete(); });
    const bool any_g_discrete = std::any_of(spec_.baselines_g.begin(), spec_.baselines_g.end(),
                                            [](const BaselineCdf& g) { return g.is_discrete(); });

    if (all_g_discrete) {
        std::vector<double> atoms;
        for (const auto& g : spec_.baselines_g) {
            for (const auto& j : g.jumps()) atoms.push_back(j.location);
        }
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
        std::vector<double> cumulative;
        for (double a : atoms) cumulative.push_back(eval_cdf(a));
        for (std::size_t i = 0; i < count; ++i) {
            const double u = uniform();
            const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
            out.push_back(it == cumulative.end() ? atoms.back() : atoms[static_cast<std::size_t>(it - cumulative.begin())]);
        }
        return out;
    }

    const bool t7 = spec_.baseline_f.is_discrete() && is_one(spec_.scale_u) && is_one(spec_.scale_v);
    if (any_g_discrete || (spec_.baseline_f.is_discrete() && !t7)) {
        throw DomainError("sampling supports continuous or discrete H only; this spec may be mixed");
    }

    // Bracket spanning the union of the G supports.
    double lo = kInf, hi = -kInf;
    for (const auto& g : spec_.baselines_g) {
        lo = std::min(lo, g.support_lo().is_finite() ? g.support_lo().raw() : baseline_quantile(g, 1e-12));
        hi = std::max(hi, g.support_hi().is_finite() ? g.support_hi().raw() : baseline_quantile(g, 1.0 - 1e-12));
    }
    const auto h = [this](double x) { return eval_cdf(x); };
    for (std::size_t i = 0; i < count; ++i) {
        const double u = uniform();
        double a = lo, b = hi;
        for (int k = 0; k < 200 && h(a) > u; ++k) a -= std::max(1.0, b - a);
        for (int k = 0; k < 200 && h(b) < u; ++k) b += std::max(1.0, b - a);
        if (h(a) >= u) {
            out.push_back(a);
            continue;
        }
        out.push_back(numerics::bracketed_root(h, u, a, b, tol_.root * std::max(1.0, b - a)));
    }
    return out;
}

GeneratorSpec rewrap_as_uniform(const GeneratedCdf& h) {
    const std::size_t m = h.spec().m();
    auto fn = [h](std::span<const double> g) { return std::clamp(h.eval_from_g(g), 0.0, 1.0); };
    const dsl::DirectionVector dirs(m, dsl::Direction{Monotonicity::Nondecreasing, false});
    auto mu = dsl::opaque(fn, dirs, dsl::Range{0.0, 1.0}, "H");
    return GeneratorSpec{
        Form::Direct,
        dsl::constant(1.0, m),
        dsl::constant(0.0, m),
        {LimitSet{mu, dsl::constant(0.0, m), dsl::constant(0.0, m), dsl::constant(0.0, m)}},
        make_uniform01(),
        h.spec().baselines_g,
    };
}

}  // namespace gencdf
