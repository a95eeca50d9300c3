#include "gencdf/dsl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gencdf/errors.hpp"

namespace gencdf::dsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

NodePtr make_node(NodeKind kind, std::vector<NodePtr> children = {}, double param = 0.0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children = std::move(children);
    n->param = param;
    return n;
}

NodePtr make_const(double c) {
    if (c == kInf) return make_node(NodeKind::PosInf);
    if (c == -kInf) return make_node(NodeKind::NegInf);
    return make_node(NodeKind::Const, {}, c);
}

bool node_is_constant(const Node& n) {
    switch (n.kind) {
        case NodeKind::Var:
            return false;
        case NodeKind::Const:
        case NodeKind::PosInf:
        case NodeKind::NegInf:
            return true;
        case NodeKind::Opaque:
            return std::all_of(n.opaque_directions.begin(), n.opaque_directions.end(),
                               [](const Direction& d) { return d.kind == Monotonicity::Constant; });
        default:
            return std::all_of(n.children.begin(), n.children.end(),
                               [](const NodePtr& c) { return node_is_constant(*c); });
    }
}

bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == NodeKind::Opaque) return &a == &b;
    if (a.kind != NodeKind::Ratio && a.param != b.param) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!nodes_equal(*a.children[i], *b.children[i])) return false;
    }
    return true;
}

void check_point(std::span<const double> point, std::size_t arity) {
    if (point.size() != arity) {
        throw DomainError("point has " + std::to_string(point.size()) + " coordinates, expression arity is " +
                          std::to_string(arity));
    }
    for (double p : point) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("point coordinate " + format_real(p) + " outside [0, 1]");
    }
}

double eval_node(const Node& n, std::span<const double> point) {
    switch (n.kind) {
        case NodeKind::Var:
            return point[static_cast<std::size_t>(n.param) - 1];
        case NodeKind::Const:
            return n.param;
        case NodeKind::PosInf:
            return kInf;
        case NodeKind::NegInf:
            return -kInf;
        case NodeKind::Sum: {
            double s = 0.0;
            for (const auto& c : n.children) s += eval_node(*c, point);
            if (std::isnan(s)) throw DomainError("indeterminate sum of opposite infinities");
            return s;
        }
        case NodeKind::Product: {
            double p = 1.0;
            for (const auto& c : n.children) p *= eval_node(*c, point);
            if (std::isnan(p)) throw DomainError("indeterminate product 0 * inf");
            return p;
        }
        case NodeKind::Power: {
            const double x = eval_node(*n.children[0], point);
            if (x < 0.0) throw DomainError("power of a negative value");
            return std::pow(x, n.param);
        }
        case NodeKind::Complement:
            return 1.0 - eval_node(*n.children[0], point);
        case NodeKind::AffineMix: {
            const double x = eval_node(*n.children[0], point);
            return (1.0 - n.param) * x + n.param;
        }
        case NodeKind::NegLog: {
            const double x = eval_node(*n.children[0], point);
            if (x < 0.0) throw DomainError("-ln of a negative value");
            if (x == 0.0) return kInf;
            return -std::log(x);
        }
        case NodeKind::NegLogComplement: {
            const double x = eval_node(*n.children[0], point);
            if (x > 1.0) throw DomainError("-ln(1 - x) with x > 1");
            if (x == 1.0) return kInf;
            return -std::log1p(-x);
        }
        case NodeKind::Scale:
            return n.param * eval_node(*n.children[0], point);
        case NodeKind::Ratio: {
            const double num = eval_node(*n.children[0], point);
            const double den = eval_node(*n.children[1], point);
            if (!(den > 0.0)) throw DomainError("ratio denominator is " + format_real(den));
            const double r = num / den;
            if (std::isnan(r)) throw DomainError("indeterminate ratio");
            return r;
        }
        case NodeKind::ExpNeg:
            return std::exp(-eval_node(*n.children[0], point));
        case NodeKind::Opaque: {
            const double v = n.opaque(point);
            if (std::isnan(v)) throw DomainError("opaque map '" + n.label + "' returned NaN");
            return v;
        }
    }
    throw DomainError("unknown node kind");
}

// ---------------------------------------------------------------------------
// Interval enclosure

Range widen() { return {-kInf, kInf}; }

Range checked(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi)) return widen();
    return {std::min(lo, hi), std::max(lo, hi)};
}

double safe_mul(double a, double b) {
    if ((a == 0.0 && std::isinf(b)) || (b == 0.0 && std::isinf(a))) return std::numeric_limits<double>::quiet_NaN();
    return a * b;
}

Range range_node(const Node& n) {
    switch (n.kind) {
        case NodeKind::Var:
            return {0.0, 1.0};
        case NodeKind::Const:
            return {n.param, n.param};
        case NodeKind::PosInf:
            return {kInf, kInf};
        case NodeKind::NegInf:
            return {-kInf, -kInf};
        case NodeKind::Sum: {
            double lo = 0.0, hi = 0.0;
            for (const auto& c : n.children) {
                const Range r = range_node(*c);
                lo += r.lo;
                hi += r.hi;
            }
            return checked(lo, hi);
        }
        case NodeKind::Product: {
            Range acc{1.0, 1.0};
            for (const auto& c : n.children) {
                const Range r = range_node(*c);
                const double p[4] = {safe_mul(acc.lo, r.lo), safe_mul(acc.lo, r.hi), safe_mul(acc.hi, r.lo),
                                     safe_mul(acc.hi, r.hi)};
                if (std::any_of(std::begin(p), std::end(p), [](double v) { return std::isnan(v); })) return widen();
                acc = {*std::min_element(std::begin(p), std::end(p)), *std::max_element(std::begin(p), std::end(p))};
            }
            return acc;
        }
        case NodeKind::Power: {
            const Range r = range_node(*n.children[0]);
            if (r.lo < 0.0) return {0.0, kInf};
            return {std::pow(r.lo, n.param), std::pow(r.hi, n.param)};
        }
        case NodeKind::Complement: {
            const Range r = range_node(*n.children[0]);
            return checked(1.0 - r.hi, 1.0 - r.lo);
        }
        case NodeKind::AffineMix: {
            const Range r = range_node(*n.children[0]);
            return checked((1.0 - n.param) * r.lo + n.param, (1.0 - n.param) * r.hi + n.param);
        }
        case NodeKind::NegLog: {
            const Range r = range_node(*n.children[0]);
            const double lo = r.hi <= 0.0 ? kInf : -std::log(r.hi);
            const double hi = r.lo <= 0.0 ? kInf : -std::log(r.lo);
            return checked(lo, hi);
        }
        case NodeKind::NegLogComplement: {
            const Range r = range_node(*n.children[0]);
            const double lo = r.lo >= 1.0 ? kInf : -std::log1p(-r.lo);
            const double hi = r.hi >= 1.0 ? kInf : -std::log1p(-r.hi);
            return checked(lo, hi);
        }
        case NodeKind::Scale: {
            const Range r = range_node(*n.children[0]);
            return checked(safe_mul(n.param, r.lo), safe_mul(n.param, r.hi));
        }
        case NodeKind::Ratio: {
            const Range num = range_node(*n.children[0]);
            const Range den = range_node(*n.children[1]);
            const double floor = n.param;
            const double den_lo = std::max(den.lo, floor);
            const double q[4] = {num.lo / den_lo, num.lo / den.hi, num.hi / den_lo, num.hi / den.hi};
            Range r{*std::min_element(std::begin(q), std::end(q)), *std::max_element(std::begin(q), std::end(q))};
            if (std::any_of(std::begin(q), std::end(q), [](double v) { return std::isnan(v); })) r = widen();
            // N / (N + R) with N, R >= 0 lies in [0, 1].
            const auto& d = *n.children[1];
            if (d.kind == NodeKind::Sum && num.lo >= 0.0 && den.lo >= 0.0) {
                for (const auto& t : d.children) {
                    if (nodes_equal(*t, *n.children[0])) {
                        r.lo = std::max(r.lo, 0.0);
                        r.hi = std::min(r.hi, 1.0);
                        break;
                    }
                }
            }
            return r;
        }
        case NodeKind::ExpNeg: {
            const Range r = range_node(*n.children[0]);
            return checked(std::exp(-r.hi), std::exp(-r.lo));
        }
        case NodeKind::Opaque:
            return n.opaque_range;
    }
    return widen();
}

// ---------------------------------------------------------------------------
// Direction inference

Direction flip(Direction d) {
    if (d.kind == Monotonicity::Nondecreasing) d.kind = Monotonicity::Nonincreasing;
    else if (d.kind == Monotonicity::Nonincreasing) d.kind = Monotonicity::Nondecreasing;
    return d;
}

Direction combine(Direction a, Direction b) {
    if (a.kind == Monotonicity::Unknown || b.kind == Monotonicity::Unknown) return {Monotonicity::Unknown, false};
    if (a.kind == Monotonicity::Constant) return b;
    if (b.kind == Monotonicity::Constant) return a;
    if (a.kind == b.kind) return {a.kind, a.strict || b.strict};
    return {Monotonicity::Unknown, false};
}

Direction unknown_if_varies(Direction d) {
    return d.kind == Monotonicity::Constant ? d : Direction{Monotonicity::Unknown, false};
}

DirectionVector directions(const Node& n, std::size_t m);

DirectionVector all_unknown_where_varying(const DirectionVector& v) {
    DirectionVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = unknown_if_varies(v[i]);
    return out;
}

DirectionVector directions_product(const Node& n, std::size_t m) {
    double coefficient = 1.0;
    std::vector<const Node*> varying;
    for (const auto& c : n.children) {
        if (node_is_constant(*c)) {
            coefficient *= eval_node(*c, std::vector<double>(m, 0.0));
        } else {
            varying.push_back(c.get());
        }
    }
    DirectionVector out(m);
    if (coefficient == 0.0 || varying.empty()) return out;

    std::vector<DirectionVector> dirs;
    std::vector<Range> ranges;
    bool nonnegative = true;
    for (const Node* f : varying) {
        dirs.push_back(directions(*f, m));
        ranges.push_back(range_node(*f));
        if (ranges.back().lo < 0.0) nonnegative = false;
    }
    for (std::size_t z = 0; z < m; ++z) {
        Direction acc{};
        for (const auto& d : dirs) acc = combine(acc, d[z]);
        if (!nonnegative) {
            out[z] = unknown_if_varies(acc);
            continue;
        }
        if (acc.kind == Monotonicity::Unknown) {
            out[z] = acc;
            continue;
        }
        bool strict = false;
        for (std::size_t i = 0; i < varying.size(); ++i) {
            if (!dirs[i][z].strict) continue;
            bool others_positive = true;
            for (std::size_t j = 0; j < varying.size(); ++j) {
                if (j != i && !(ranges[j].lo > 0.0)) others_positive = false;
            }
            if (others_positive) strict = true;
        }
        acc.strict = strict && acc.kind != Monotonicity::Constant;
        out[z] = coefficient < 0.0 ? flip(acc) : acc;
    }
    return out;
}

DirectionVector directions_ratio(const Node& n, std::size_t m) {
    const Node& num = *n.children[0];
    const Node& den = *n.children[1];
    const DirectionVector dn = directions(num, m);
    if (node_is_constant(den)) return dn;

    const Range num_range = range_node(num);
    if (den.kind == NodeKind::Sum && num_range.lo >= 0.0) {
        std::vector<NodePtr> rest;
        bool found = false;
        for (const auto& t : den.children) {
            if (!found && nodes_equal(*t, num)) {
                found = true;
            } else {
                rest.push_back(t);
            }
        }
        if (found) {
            auto rest_node = rest.size() == 1 ? rest.front() : make_node(NodeKind::Sum, rest);
            const Range rest_range = range_node(*rest_node);
            if (rest_range.lo >= 0.0) {
                const DirectionVector dr = directions(*rest_node, m);
                DirectionVector out(m);
                for (std::size_t z = 0; z < m; ++z) {
                    const Direction fr = flip(dr[z]);
                    Direction d = combine(dn[z], fr);
                    if (d.kind == Monotonicity::Nondecreasing || d.kind == Monotonicity::Nonincreasing) {
                        d.strict = (dn[z].strict && (fr.strict || rest_range.lo > 0.0)) ||
                                   (fr.strict && num_range.lo > 0.0);
                    }
                    out[z] = d;
                }
                return out;
            }
        }
    }
    if (node_is_constant(num) && num_range.lo >= 0.0) {
        DirectionVector out = directions(den, m);
        for (auto& d : out) {
            d = flip(d);
            if (!(num_range.lo > 0.0)) d.strict = false;
        }
        return out;
    }
    DirectionVector out = dn;
    const DirectionVector dd = directions(den, m);
    for (std::size_t z = 0; z < m; ++z) {
        out[z] = (dn[z].kind == Monotonicity::Constant && dd[z].kind == Monotonicity::Constant)
                     ? Direction{}
                     : Direction{Monotonicity::Unknown, false};
    }
    return out;
}

DirectionVector directions(const Node& n, std::size_t m) {
    DirectionVector out(m);
    switch (n.kind) {
        case NodeKind::Var:
            out[static_cast<std::size_t>(n.param) - 1] = {Monotonicity::Nondecreasing, true};
            return out;
        case NodeKind::Const:
        case NodeKind::PosInf:
        case NodeKind::NegInf:
            return out;
        case NodeKind::Sum:
            for (const auto& c : n.children) {
                const auto d = directions(*c, m);
                for (std::size_t z = 0; z < m; ++z) out[z] = combine(out[z], d[z]);
            }
            return out;
        case NodeKind::Product:
            return directions_product(n, m);
        case NodeKind::Power: {
            const auto d = directions(*n.children[0], m);
            if (range_node(*n.children[0]).lo < 0.0) return all_unknown_where_varying(d);
            return d;
        }
        case NodeKind::Complement:
        case NodeKind::ExpNeg: {
            auto d = directions(*n.children[0], m);
            for (auto& x : d) x = flip(x);
            return d;
        }
        case NodeKind::AffineMix:
        case NodeKind::Scale:
            return directions(*n.children[0], m);
        case NodeKind::NegLog: {
            auto d = directions(*n.children[0], m);
            if (range_node(*n.children[0]).lo < 0.0) return all_unknown_where_varying(d);
            for (auto& x : d) x = flip(x);
            return d;
        }
        case NodeKind::NegLogComplement: {
            auto d = directions(*n.children[0], m);
            if (range_node(*n.children[0]).hi > 1.0) return all_unknown_where_varying(d);
            return d;
        }
        case NodeKind::Ratio:
            return directions_ratio(n, m);
        case NodeKind::Opaque:
            return n.opaque_directions;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Symbolic derivative

struct Dual {
    double value;
    double deriv;
    bool ok;
};

Dual derive(const Node& n, std::size_t var, std::span<const double> point) {
    switch (n.kind) {
        case NodeKind::Var:
            return {point[static_cast<std::size_t>(n.param) - 1], static_cast<std::size_t>(n.param) == var ? 1.0 : 0.0,
                    true};
        case NodeKind::Const:
            return {n.param, 0.0, true};
        case NodeKind::PosInf:
            return {kInf, 0.0, true};
        case NodeKind::NegInf:
            return {-kInf, 0.0, true};
        case NodeKind::Sum: {
            Dual acc{0.0, 0.0, true};
            for (const auto& c : n.children) {
                const Dual d = derive(*c, var, point);
                acc.value += d.value;
                acc.deriv += d.deriv;
                acc.ok = acc.ok && d.ok;
            }
            return acc;
        }
        case NodeKind::Product: {
            std::vector<Dual> ds;
            for (const auto& c : n.children) ds.push_back(derive(*c, var, point));
            Dual acc{1.0, 0.0, true};
            for (std::size_t i = 0; i < ds.size(); ++i) {
                acc.value *= ds[i].value;
                acc.ok = acc.ok && ds[i].ok;
                if (ds[i].deriv == 0.0) continue;
                double term = ds[i].deriv;
                for (std::size_t j = 0; j < ds.size(); ++j) {
                    if (j != i) term *= ds[j].value;
                }
                acc.deriv += term;
            }
            return acc;
        }
        case NodeKind::Power: {
            const Dual c = derive(*n.children[0], var, point);
            const double v = std::pow(c.value, n.param);
            if (c.deriv == 0.0) return {v, 0.0, c.ok};
            return {v, n.param * std::pow(c.value, n.param - 1.0) * c.deriv, c.ok};
        }
        case NodeKind::Complement: {
            const Dual c = derive(*n.children[0], var, point);
            return {1.0 - c.value, -c.deriv, c.ok};
        }
        case NodeKind::AffineMix: {
            const Dual c = derive(*n.children[0], var, point);
            return {(1.0 - n.param) * c.value + n.param, (1.0 - n.param) * c.deriv, c.ok};
        }
        case NodeKind::NegLog: {
            const Dual c = derive(*n.children[0], var, point);
            const double v = c.value == 0.0 ? kInf : -std::log(c.value);
            return {v, c.deriv == 0.0 ? 0.0 : -c.deriv / c.value, c.ok};
        }
        case NodeKind::NegLogComplement: {
            const Dual c = derive(*n.children[0], var, point);
            const double v = c.value == 1.0 ? kInf : -std::log1p(-c.value);
            return {v, c.deriv == 0.0 ? 0.0 : c.deriv / (1.0 - c.value), c.ok};
        }
        case NodeKind::Scale: {
            const Dual c = derive(*n.children[0], var, point);
            return {n.param * c.value, n.param * c.deriv, c.ok};
        }
        case NodeKind::Ratio: {
            const Dual a = derive(*n.children[0], var, point);
            const Dual b = derive(*n.children[1], var, point);
            return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value), a.ok && b.ok};
        }
        case NodeKind::ExpNeg: {
            const Dual c = derive(*n.children[0], var, point);
            const double v = std::exp(-c.value);
            return {v, c.deriv == 0.0 ? 0.0 : -v * c.deriv, c.ok};
        }
        case NodeKind::Opaque:
            return {n.opaque(point), 0.0, false};
    }
    return {0.0, 0.0, false};
}

// ---------------------------------------------------------------------------
// Printing

bool is_atomic(const Node& n) {
    return n.kind == NodeKind::Var || n.kind == NodeKind::PosInf ||
           (n.kind == NodeKind::Const && n.param >= 0.0);
}

std::string print(const Node& n);

std::string wrapped(const Node& n) {
    const std::string s = print(n);
    return is_atomic(n) ? s : "(" + s + ")";
}

std::string print(const Node& n) {
    switch (n.kind) {
        case NodeKind::Var:
            return "g" + std::to_string(static_cast<std::size_t>(n.param));
        case NodeKind::Const:
            return format_real(n.param);
        case NodeKind::PosInf:
            return "inf";
        case NodeKind::NegInf:
            return "-inf";
        case NodeKind::Sum: {
            std::string out;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                const Node& c = *n.children[i];
                if (i == 0) {
                    out += wrapped(c);
                } else if (c.kind == NodeKind::Const && c.param < 0.0) {
                    out += " - " + format_real(-c.param);
                } else {
                    out += " + " + wrapped(c);
                }
            }
            return out;
        }
        case NodeKind::Product: {
            std::string out;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0) out += "*";
                const Node& c = *n.children[i];
                out += (i == 0 && c.kind == NodeKind::Const) ? format_real(c.param) : wrapped(c);
            }
            return out;
        }
        case NodeKind::Power:
            return wrapped(*n.children[0]) + "^" + format_real(n.param);
        case NodeKind::Complement:
            return "1 - " + wrapped(*n.children[0]);
        case NodeKind::AffineMix:
            return format_real(n.param) + " + (1 - " + format_real(n.param) + ")*" + wrapped(*n.children[0]);
        case NodeKind::NegLog:
            return "-ln(" + print(*n.children[0]) + ")";
        case NodeKind::NegLogComplement:
            return "-ln(1 - " + wrapped(*n.children[0]) + ")";
        case NodeKind::Scale:
            return format_real(n.param) + "*" + wrapped(*n.children[0]);
        case NodeKind::Ratio:
            return wrapped(*n.children[0]) + "/" + wrapped(*n.children[1]);
        case NodeKind::ExpNeg:
            return "exp(-" + wrapped(*n.children[0]) + ")";
        case NodeKind::Opaque:
            throw DomainError("opaque map '" + n.label + "' has no textual form");
    }
    return {};
}

// ---------------------------------------------------------------------------
// Ratio floor certificate

// Writes `n` as a * inner + b when it is an affine image of `inner`.
bool affine_in(const Node& n, const Node*& inner, double& a, double& b) {
    auto bind = [&](const Node& e) {
        if (inner == nullptr) {
            inner = &e;
            return true;
        }
        return nodes_equal(*inner, e);
    };
    switch (n.kind) {
        case NodeKind::Const:
            a = 0.0;
            b = n.param;
            return true;
        case NodeKind::Complement: {
            double ca = 0.0, cb = 0.0;
            if (!affine_in(*n.children[0], inner, ca, cb)) return false;
            a = -ca;
            b = 1.0 - cb;
            return true;
        }
        case NodeKind::Scale: {
            double ca = 0.0, cb = 0.0;
            if (!affine_in(*n.children[0], inner, ca, cb)) return false;
            a = n.param * ca;
            b = n.param * cb;
            return true;
        }
        case NodeKind::AffineMix: {
            double ca = 0.0, cb = 0.0;
            if (!affine_in(*n.children[0], inner, ca, cb)) return false;
            a = (1.0 - n.param) * ca;
            b = (1.0 - n.param) * cb + n.param;
            return true;
        }
        case NodeKind::Sum: {
            a = 0.0;
            b = 0.0;
            for (const auto& c : n.children) {
                double ca = 0.0, cb = 0.0;
                if (!affine_in(*c, inner, ca, cb)) return false;
                a += ca;
                b += cb;
            }
            return true;
        }
        default:
            if (!bind(n)) return false;
            a = 1.0;
            b = 0.0;
            return true;
    }
}

double derived_floor(const Node& den) {
    const Range r = range_node(den);
    if (r.lo > 0.0) return r.lo;
    const Node* inner = nullptr;
    double a = 0.0, b = 0.0;
    if (affine_in(den, inner, a, b) && inner != nullptr) {
        const Range ir = range_node(*inner);
        if (std::isfinite(ir.lo) && std::isfinite(ir.hi)) {
            const double lo = std::min(a * ir.lo + b, a * ir.hi + b);
            if (lo > 0.0) return lo;
        }
    }
    return 0.0;
}

NodePtr rebuild(const NodePtr& n, const NodePtr& replacement_for_g1, std::size_t arity);

MonotoneExpr wrap(NodePtr n, std::size_t arity) { return MonotoneExpr(std::move(n), arity); }

std::size_t common_arity(const std::vector<MonotoneExpr>& xs) {
    if (xs.empty()) throw DomainError("empty operand list");
    const std::size_t m = xs.front().arity();
    for (const auto& x : xs) {
        if (x.arity() != m) throw DomainError("operands have different arities");
    }
    return m;
}

MonotoneExpr folded(NodePtr n, std::size_t arity) {
    if (n->kind != NodeKind::Opaque && node_is_constant(*n)) {
        return wrap(make_const(eval_node(*n, std::vector<double>(arity, 0.0))), arity);
    }
    return wrap(std::move(n), arity);
}

}  // namespace

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Constant:
            return "constant";
        case Monotonicity::Nondecreasing:
            return "nondecreasing";
        case Monotonicity::Nonincreasing:
            return "nonincreasing";
        case Monotonicity::Unknown:
            return "unknown";
    }
    return "unknown";
}

MonotoneExpr::MonotoneExpr(NodePtr root, std::size_t arity) : root_(std::move(root)), arity_(arity) {
    if (!root_) throw DomainError("null expression");
    if (arity_ == 0) throw DomainError("expression arity must be positive");
}

ExtReal MonotoneExpr::eval(std::span<const double> point) const {
    check_point(point, arity_);
    return ExtReal(eval_node(*root_, point));
}

std::pair<ExtReal, ExtReal> MonotoneExpr::corner_values() const {
    const std::vector<double> zeros(arity_, 0.0);
    const std::vector<double> ones(arity_, 1.0);
    return {eval(zeros), eval(ones)};
}

DirectionVector MonotoneExpr::infer_direction() const { return directions(*root_, arity_); }

Range MonotoneExpr::range() const { return range_node(*root_); }

bool MonotoneExpr::is_constant() const { return node_is_constant(*root_); }

std::string MonotoneExpr::to_string() const { return print(*root_); }

bool operator==(const MonotoneExpr& a, const MonotoneExpr& b) {
    return a.arity_ == b.arity_ && nodes_equal(*a.root_, *b.root_);
}

PartialResult partial(const MonotoneExpr& expr, std::size_t var, std::span<const double> point) {
    if (var == 0 || var > expr.arity()) throw DomainError("partial: variable index out of range");
    const ExtReal at = expr.eval(point);
    if (!at.is_finite()) throw DomainError("partial: expression is not finite at the point");
    const Dual d = derive(expr.root(), var, point);
    if (d.ok && std::isfinite(d.deriv)) return {d.deriv, true};

    constexpr double h = 1e-6;
    std::vector<double> lo(point.begin(), point.end());
    std::vector<double> hi(point.begin(), point.end());
    const double x = point[var - 1];
    lo[var - 1] = std::max(0.0, x - h);
    hi[var - 1] = std::min(1.0, x + h);
    const double width = hi[var - 1] - lo[var - 1];
    const double diff = (expr.eval(hi).raw() - expr.eval(lo).raw()) / width;
    if (!std::isfinite(diff)) throw DomainError("partial: finite difference is not finite");
    return {diff, false};
}

MonotoneExpr MonotoneExpr::compose(const MonotoneExpr& argument) const {
    if (arity_ != 1) throw DomainError("compose needs a one-variable outer map");
    return wrap(rebuild(root_, argument.root_ptr(), argument.arity()), argument.arity());
}

// ---------------------------------------------------------------------------
// Builders

MonotoneExpr var(std::size_t index, std::size_t arity) {
    if (index == 0 || index > arity) {
        throw DomainError("variable g" + std::to_string(index) + " exceeds arity " + std::to_string(arity));
    }
    return wrap(make_node(NodeKind::Var, {}, static_cast<double>(index)), arity);
}

MonotoneExpr constant(double value, std::size_t arity) {
    if (std::isnan(value)) throw DomainError("constant cannot be NaN");
    return wrap(make_const(value), arity);
}

MonotoneExpr pos_inf(std::size_t arity) { return wrap(make_node(NodeKind::PosInf), arity); }
MonotoneExpr neg_inf(std::size_t arity) { return wrap(make_node(NodeKind::NegInf), arity); }

MonotoneExpr sum(const std::vector<MonotoneExpr>& terms) {
    const std::size_t m = common_arity(terms);
    std::vector<NodePtr> flat;
    double c = 0.0;
    bool has_const = false;
    for (const auto& t : terms) {
        std::vector<NodePtr> parts;
        if (t.root().kind == NodeKind::Sum) {
            parts = t.root().children;
        } else {
            parts.push_back(t.root_ptr());
        }
        for (auto& p : parts) {
            if (p->kind == NodeKind::Const) {
                c += p->param;
                has_const = true;
            } else {
                flat.push_back(p);
            }
        }
    }
    if (has_const && c != 0.0) flat.push_back(make_const(c));
    if (flat.empty()) return constant(c, m);
    if (flat.size() == 1) return folded(flat.front(), m);
    if (std::all_of(flat.begin(), flat.end(), [](const NodePtr& p) { return node_is_constant(*p); })) {
        return folded(make_node(NodeKind::Sum, flat), m);
    }
    // theta + (1 - theta) * e  ->  AffineMix(e, theta)
    if (flat.size() == 2 && flat[1]->kind == NodeKind::Const && flat[0]->kind == NodeKind::Scale) {
        const double theta = flat[1]->param;
        if (theta > 0.0 && theta < 1.0 && flat[0]->param == 1.0 - theta) {
            return wrap(make_node(NodeKind::AffineMix, {flat[0]->children[0]}, theta), m);
        }
    }
    return wrap(make_node(NodeKind::Sum, flat), m);
}

MonotoneExpr product(const std::vector<MonotoneExpr>& factors) {
    const std::size_t m = common_arity(factors);
    std::vector<NodePtr> flat;
    double c = 1.0;
    for (const auto& f : factors) {
        std::vector<NodePtr> parts;
        if (f.root().kind == NodeKind::Product) {
            parts = f.root().children;
        } else {
            parts.push_back(f.root_ptr());
        }
        for (auto& p : parts) {
            if (p->kind == NodeKind::Const) {
                c *= p->param;
            } else {
                flat.push_back(p);
            }
        }
    }
    if (flat.empty()) return constant(c, m);
    if (c == 0.0 && std::none_of(flat.begin(), flat.end(), [](const NodePtr& p) {
            return p->kind == NodeKind::PosInf || p->kind == NodeKind::NegInf;
        })) {
        // 0 * finite factors: the factors may still be infinite at the
        // corners, so keep the product unless every factor is bounded.
        bool bounded = true;
        for (const auto& p : flat) {
            const Range r = range_node(*p);
            if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) bounded = false;
        }
        if (bounded) return constant(0.0, m);
    }
    NodePtr core = flat.size() == 1 ? flat.front() : make_node(NodeKind::Product, flat);
    if (c == 1.0) return folded(core, m);
    if (c > 0.0) return scale(wrap(core, m), c);
    std::vector<NodePtr> with_const{make_const(c)};
    with_const.insert(with_const.end(), flat.begin(), flat.end());
    return folded(make_node(NodeKind::Product, with_const), m);
}

MonotoneExpr power(const MonotoneExpr& child, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("power exponent must be finite and >= 0");
    if (alpha == 0.0) return constant(1.0, child.arity());
    if (alpha == 1.0) return child;
    return folded(make_node(NodeKind::Power, {child.root_ptr()}, alpha), child.arity());
}

MonotoneExpr complement(const MonotoneExpr& child) {
    return folded(make_node(NodeKind::Complement, {child.root_ptr()}), child.arity());
}

MonotoneExpr affine_mix(const MonotoneExpr& child, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("affine mix weight must lie in [0, 1]");
    if (theta == 0.0) return child;
    if (theta == 1.0) return constant(1.0, child.arity());
    return folded(make_node(NodeKind::AffineMix, {child.root_ptr()}, theta), child.arity());
}

MonotoneExpr neg_log(const MonotoneExpr& child) {
    if (child.root().kind == NodeKind::Complement) {
        return neg_log_complement(MonotoneExpr(child.root().children[0], child.arity()));
    }
    return folded(make_node(NodeKind::NegLog, {child.root_ptr()}), child.arity());
}

MonotoneExpr neg_log_complement(const MonotoneExpr& child) {
    return folded(make_node(NodeKind::NegLogComplement, {child.root_ptr()}), child.arity());
}

MonotoneExpr scale(const MonotoneExpr& child, double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("scale factor must be finite and >= 0");
    if (c == 1.0) return child;
    if (c == 0.0) {
        const Range r = child.range();
        if (std::isfinite(r.lo) && std::isfinite(r.hi)) return constant(0.0, child.arity());
    }
    if (child.root().kind == NodeKind::Scale) {
        return scale(MonotoneExpr(child.root().children[0], child.arity()), c * child.root().param);
    }
    return folded(make_node(NodeKind::Scale, {child.root_ptr()}, c), child.arity());
}

MonotoneExpr exp_neg(const MonotoneExpr& child) {
    return folded(make_node(NodeKind::ExpNeg, {child.root_ptr()}), child.arity());
}

MonotoneExpr ratio(const MonotoneExpr& num, const MonotoneExpr& den, double declared_floor) {
    if (num.arity() != den.arity()) throw DomainError("ratio operands have different arities");
    const std::size_t m = num.arity();
    double floor = derived_floor(den.root());
    if (!(floor > 0.0)) {
        if (!(declared_floor > 0.0)) {
            throw DomainError("cannot certify a positive lower bound for the denominator " + den.to_string());
        }
        // Check the declared bound on a lattice of the cube.
        const std::size_t d = std::min<std::size_t>(m, 3);
        std::size_t total = 1;
        for (std::size_t i = 0; i < d; ++i) total *= 17;
        std::vector<double> p(m);
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t r = idx;
            for (std::size_t i = 0; i < m; ++i) {
                p[i] = static_cast<double>(r % 17) / 16.0;
                if (i + 1 < d) r /= 17;
            }
            if (den.eval(p).raw() < declared_floor) {
                throw DomainError("declared denominator floor " + format_real(declared_floor) + " violated");
            }
        }
        floor = declared_floor;
    }
    return folded(make_node(NodeKind::Ratio, {num.root_ptr(), den.root_ptr()}, floor), m);
}

MonotoneExpr opaque(OpaqueFunction fn, DirectionVector directions, Range range, std::string label) {
    if (directions.empty()) throw DomainError("opaque map needs at least one variable");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Opaque;
    n->opaque = std::move(fn);
    n->opaque_directions = std::move(directions);
    n->opaque_range = range;
    n->label = std::move(label);
    const std::size_t m = n->opaque_directions.size();
    return MonotoneExpr(std::move(n), m);
}

namespace {

NodePtr rebuild(const NodePtr& n, const NodePtr& replacement_for_g1, std::size_t arity) {
    if (n->kind == NodeKind::Var) return replacement_for_g1;
    if (n->children.empty()) return n;
    std::vector<NodePtr> children;
    for (const auto& c : n->children) children.push_back(rebuild(c, replacement_for_g1, arity));
    std::vector<MonotoneExpr> xs;
    for (auto& c : children) xs.emplace_back(c, arity);
    switch (n->kind) {
        case NodeKind::Sum:
            return sum(xs).root_ptr();
        case NodeKind::Product:
            return product(xs).root_ptr();
        case NodeKind::Power:
            return power(xs[0], n->param).root_ptr();
        case NodeKind::Complement:
            return complement(xs[0]).root_ptr();
        case NodeKind::AffineMix:
            return affine_mix(xs[0], n->param).root_ptr();
        case NodeKind::NegLog:
            return neg_log(xs[0]).root_ptr();
        case NodeKind::NegLogComplement:
            return neg_log_complement(xs[0]).root_ptr();
        case NodeKind::Scale:
            return scale(xs[0], n->param).root_ptr();
        case NodeKind::Ratio:
            return ratio(xs[0], xs[1], n->param).root_ptr();
        case NodeKind::ExpNeg:
            return exp_neg(xs[0]).root_ptr();
        default:
            return n;
    }
}

}  // namespace

}  // namespace gencdf::dsl
