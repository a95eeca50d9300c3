#include "gencdf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gencdf/baseline.hpp"

namespace gencdf {

namespace {

constexpr double kRise = 1e-10;
constexpr double kEdge = 1e-8;
constexpr double kAtomWidth = 1e-6;

bool inside(const SupportInterval& iv, double x, double slack) {
    return iv.lo.raw() - slack <= x && x <= iv.hi.raw() + slack;
}

bool f_equal(const BaselineCdf& f, ExtReal a, ExtReal b) {
    if (approx_equal(a, b, 1e-12)) return true;
    return std::fabs(f.eval(a) - f.eval(b)) <= 1e-12;
}

bool strict_somewhere(const dsl::MonotoneExpr& e) {
    for (const auto& d : e.infer_direction()) {
        if (d.strict) return true;
    }
    return false;
}

bool has_opaque(const dsl::Node& n) {
    if (n.kind == dsl::NodeKind::Opaque) return true;
    return std::any_of(n.children.begin(), n.children.end(), [](const auto& c) { return has_opaque(*c); });
}

std::vector<const dsl::MonotoneExpr*> all_expressions(const GeneratorSpec& spec) {
    std::vector<const dsl::MonotoneExpr*> out{&spec.scale_u, &spec.scale_v};
    for (const auto& l : spec.limits) {
        out.insert(out.end(), {&l.upper, &l.lower, &l.m_lower, &l.v_upper});
    }
    return out;
}

}  // namespace

SupportSet normalized(SupportSet s) {
    std::sort(s.intervals.begin(), s.intervals.end(),
              [](const auto& a, const auto& b) { return a.lo.raw() < b.lo.raw(); });
    std::vector<SupportInterval> merged;
    for (const auto& iv : s.intervals) {
        if (!merged.empty() && iv.lo.raw() <= merged.back().hi.raw()) {
            if (iv.hi.raw() > merged.back().hi.raw()) {
                merged.back().hi = iv.hi;
                merged.back().hi_closed = iv.hi_closed;
            }
        } else {
            merged.push_back(iv);
        }
    }
    s.intervals = std::move(merged);
    std::sort(s.atoms.begin(), s.atoms.end());
    s.atoms.erase(std::unique(s.atoms.begin(), s.atoms.end()), s.atoms.end());
    std::erase_if(s.atoms, [&](double a) {
        return std::any_of(s.intervals.begin(), s.intervals.end(), [&](const auto& iv) { return inside(iv, a, 0.0); });
    });
    return s;
}

std::string render(const SupportSet& s) {
    std::ostringstream out;
    out << "intervals: ";
    if (s.intervals.empty()) out << "none";
    for (std::size_t i = 0; i < s.intervals.size(); ++i) {
        const auto& iv = s.intervals[i];
        if (i > 0) out << ", ";
        out << (iv.lo_closed && iv.lo.is_finite() ? '[' : '(') << format_real(iv.lo.raw()) << ", "
            << format_real(iv.hi.raw()) << (iv.hi_closed && iv.hi.is_finite() ? ']' : ')');
    }
    out << "\natoms: ";
    if (s.atoms.empty()) out << "none";
    for (std::size_t i = 0; i < s.atoms.size(); ++i) out << (i > 0 ? ", " : "") << format_real(s.atoms[i]);
    return out.str();
}

bool contains(const SupportSet& outer, const SupportSet& inner, double resolution) {
    auto covered = [&](double x) {
        if (std::any_of(outer.intervals.begin(), outer.intervals.end(),
                        [&](const auto& iv) { return inside(iv, x, resolution); })) {
            return true;
        }
        return std::any_of(outer.atoms.begin(), outer.atoms.end(),
                           [&](double a) { return std::fabs(a - x) <= resolution; });
    };
    for (const auto& iv : inner.intervals) {
        const bool ok = std::any_of(outer.intervals.begin(), outer.intervals.end(), [&](const auto& o) {
            return inside(o, iv.lo.raw(), resolution) && inside(o, iv.hi.raw(), resolution);
        });
        if (!ok) return false;
    }
    return std::all_of(inner.atoms.begin(), inner.atoms.end(), covered);
}

bool agrees(const SupportSet& exact, const SupportSet& scanned, double resolution) {
    if (exact.intervals.size() != scanned.intervals.size() || exact.atoms.size() != scanned.atoms.size()) {
        return false;
    }
    for (std::size_t i = 0; i < exact.intervals.size(); ++i) {
        const auto& e = exact.intervals[i];
        const auto& s = scanned.intervals[i];
        const bool lo_ok = e.lo.is_finite() ? std::fabs(e.lo.raw() - s.lo.raw()) <= resolution : true;
        const bool hi_ok = e.hi.is_finite() ? std::fabs(e.hi.raw() - s.hi.raw()) <= resolution : true;
        if (!lo_ok || !hi_ok) return false;
    }
    for (std::size_t i = 0; i < exact.atoms.size(); ++i) {
        if (std::fabs(exact.atoms[i] - scanned.atoms[i]) > resolution) return false;
    }
    return true;
}

SupportSet support_upper_bound(const GeneratorSpec& spec) {
    SupportSet s;
    for (const auto& g : spec.baselines_g) {
        if (g.is_discrete()) {
            for (const auto& j : g.jumps()) s.atoms.push_back(j.location);
        } else {
            s.intervals.push_back({g.support_lo(), g.support_hi(), g.support_lo().is_finite(),
                                   g.support_hi().is_finite()});
        }
    }
    return normalized(std::move(s));
}

std::optional<SupportSet> support_exact_if_T4(const GeneratorSpec& spec) {
    const auto& f = spec.baseline_f;
    if (!f.support_convex()) return std::nullopt;
    const auto& first = spec.limits.front();
    const auto& last = spec.limits.back();

    const bool branch_a = f_equal(f, last.upper.corner_values().second, f.support_hi()) &&
                          f_equal(f, first.lower.corner_values().second, f.support_lo()) &&
                          spec.scale_u.range().lo > 0.0 &&
                          std::any_of(spec.limits.begin(), spec.limits.end(), [](const LimitSet& l) {
                              return strict_somewhere(l.upper) || strict_somewhere(l.lower);
                          });
    const bool branch_b = f_equal(f, last.v_upper.corner_values().first, f.support_hi()) &&
                          f_equal(f, first.m_lower.corner_values().first, f.support_lo()) &&
                          spec.scale_v.range().lo > 0.0 &&
                          std::any_of(spec.limits.begin(), spec.limits.end(), [](const LimitSet& l) {
                              return strict_somewhere(l.v_upper) || strict_somewhere(l.m_lower);
                          });
    if (!branch_a && !branch_b) return std::nullopt;
    return support_upper_bound(spec);
}

SupportSet numeric_support_scan(const GeneratedCdf& h, std::size_t grid_points) {
    const auto& gs = h.spec().baselines_g;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& g : gs) {
        if (g.is_discrete()) {
            for (const auto& j : g.jumps()) {
                lo = std::min(lo, j.location);
                hi = std::max(hi, j.location);
            }
            continue;
        }
        lo = std::min(lo, g.support_lo().is_finite() ? g.support_lo().raw() : baseline_quantile(g, 1e-12));
        hi = std::max(hi, g.support_hi().is_finite() ? g.support_hi().raw() : baseline_quantile(g, 1.0 - 1e-12));
    }
    const double pad = hi > lo ? 1e-3 * (hi - lo) : 1.0;
    lo -= pad;
    hi += pad;

    const std::size_t n = std::max<std::size_t>(grid_points, 2);
    std::vector<double> xs(n), hs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        hs[i] = h.eval_cdf(xs[i]);
    }

    SupportSet out;
    std::size_t i = 0;
    while (i + 1 < n) {
        if (hs[i + 1] - hs[i] <= kRise) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && hs[j + 1] - hs[j] > kRise) ++j;
        // Edges extend over neighbouring cells that rise at all.
        while (i > 0 && hs[i] > hs[i - 1]) --i;
        while (j + 1 < n && hs[j + 1] > hs[j]) ++j;
        // Rising cells are [x_i, x_{i+1}] .. [x_{j-1}, x_j].
        double a = xs[i], b = xs[i + 1];
        while (b - a > kEdge) {
            const double mid = 0.5 * (a + b);
            (h.eval_cdf(mid) > hs[i] ? b : a) = mid;
        }
        const double left = b;
        a = xs[j - 1];
        b = xs[j];
        while (b - a > kEdge) {
            const double mid = 0.5 * (a + b);
            (h.eval_cdf(mid) < hs[j] ? a : b) = mid;
        }
        const double right = a;
        if (right - left < kAtomWidth) {
            out.atoms.push_back(left);
        } else {
            out.intervals.push_back({ExtReal(left), ExtReal(right), true, true});
        }
        i = j;
    }
    return normalized(std::move(out));
}

const char* to_string(Nature n) {
    switch (n) {
        case Nature::Discrete: return "discrete";
        case Nature::ContinuousCdf: return "continuous_cdf";
        case Nature::ContinuousRv: return "continuous_rv";
        case Nature::Mixed: return "mixed";
        case Nature::Unknown: return "unknown";
    }
    return "unknown";
}

NatureVerdict classify_nature(const GeneratorSpec& spec) {
    const auto& gs = spec.baselines_g;
    if (std::all_of(gs.begin(), gs.end(), [](const auto& g) { return g.is_discrete(); })) {
        return {Nature::Discrete, "C3.1"};
    }
    auto is_one = [](const dsl::MonotoneExpr& e) {
        return e.is_constant() && e.eval(std::vector<double>(e.arity(), 0.0)) == ExtReal(1.0);
    };
    if (spec.baseline_f.is_discrete()) {
        if (is_one(spec.scale_u) && is_one(spec.scale_v)) return {Nature::Discrete, "T7"};
        return {Nature::Unknown, ""};
    }
    if (std::any_of(gs.begin(), gs.end(), [](const auto& g) { return g.is_discrete(); })) {
        return {Nature::Mixed, ""};
    }
    const auto exprs = all_expressions(spec);
    if (std::any_of(exprs.begin(), exprs.end(), [](const auto* e) { return has_opaque(e->root()); })) {
        return {Nature::Unknown, ""};
    }
    const bool densities = spec.baseline_f.has_density() &&
                           std::all_of(gs.begin(), gs.end(), [](const auto& g) { return g.has_density(); });
    if (densities) return {Nature::ContinuousRv, "T6"};
    return {Nature::ContinuousCdf, "T5"};
}

std::string render(const NatureVerdict& v) {
    std::string out = std::string("nature: ") + to_string(v.nature);
    if (!v.justification.empty()) out += " (" + v.justification + ")";
    return out;
}

}  // namespace gencdf
