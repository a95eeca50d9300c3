#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gencdf/ext_real.hpp"

namespace gencdf::dsl {

enum class NodeKind {
    Var,               // g_i
    Const,             // c
    Sum,               // a + b + ...
    Product,           // a * b * ...
    Power,             // child ^ alpha, alpha >= 0
    Complement,        // 1 - child
    AffineMix,         // (1 - theta) * child + theta
    NegLog,            // -ln(child)
    NegLogComplement,  // -ln(1 - child)
    Scale,             // c * child, c >= 0
    Ratio,             // num / den, den bounded below by a positive floor
    ExpNeg,            // exp(-child)
    PosInf,
    NegInf,
    Opaque,            // host callable with declared directions; not parseable
};

enum class Monotonicity { Constant, Nondecreasing, Nonincreasing, Unknown };

/// Inferred behaviour of an expression in one variable. `strict` is only
/// ever claimed together with Nondecreasing or Nonincreasing.
struct Direction {
    Monotonicity kind = Monotonicity::Constant;
    bool strict = false;

    friend bool operator==(const Direction&, const Direction&) = default;
};

using DirectionVector = std::vector<Direction>;

const char* to_string(Monotonicity m);

/// Conservative enclosure of an expression's values over [0,1]^m.
struct Range {
    double lo;
    double hi;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Callable backing an Opaque node: values in [0,1]^m to an extended real.
using OpaqueFunction = std::function<double(std::span<const double>)>;

struct Node {
    NodeKind kind;
    std::vector<NodePtr> children;
    double param = 0.0;  // Var: index (1-based); Const; Power: alpha; AffineMix: theta; Scale: c; Ratio: floor
    OpaqueFunction opaque;
    DirectionVector opaque_directions;
    Range opaque_range{0.0, 1.0};
    std::string label;
};

/// Immutable monotone map [0,1]^m -> R u {+-inf}.
class MonotoneExpr {
public:
    MonotoneExpr(NodePtr root, std::size_t arity);

    const Node& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }
    std::size_t arity() const { return arity_; }

    /// Value at a point of [0,1]^m. -ln(0) = +inf and -ln(1 - 1) = +inf.
    ExtReal eval(std::span<const double> point) const;

    /// Values at (0,...,0) and (1,...,1).
    std::pair<ExtReal, ExtReal> corner_values() const;

    DirectionVector infer_direction() const;

    Range range() const;

    /// True when the expression does not depend on any variable.
    bool is_constant() const;

    /// Text in the expression grammar; parse(to_string()) reproduces the tree.
    /// Throws DomainError for Opaque nodes.
    std::string to_string() const;

    /// Replaces g1 with `argument` (used for composing one-variable maps).
    MonotoneExpr compose(const MonotoneExpr& argument) const;

    friend bool operator==(const MonotoneExpr& a, const MonotoneExpr& b);

private:
    NodePtr root_;
    std::size_t arity_;
};

struct PartialResult {
    double value = 0.0;
    bool symbolic = true;  // false: central finite difference was used
};

/// d expr / d g_var at `point` (var is 1-based).
///
/// Symbolic chain rule where every node on the path has a finite derivative;
/// otherwise a central difference with step 1e-6, one-sided at the faces of
/// the cube. Throws DomainError when the expression is not finite at point.
PartialResult partial(const MonotoneExpr& expr, std::size_t var, std::span<const double> point);

/// Parses the expression grammar over variables g1..gm.
MonotoneExpr parse(std::string_view text, std::size_t arity);

// Builders. They validate parameters and fold constants like the parser does.
MonotoneExpr var(std::size_t index, std::size_t arity);
MonotoneExpr constant(double value, std::size_t arity);
MonotoneExpr pos_inf(std::size_t arity);
MonotoneExpr neg_inf(std::size_t arity);
MonotoneExpr sum(const std::vector<MonotoneExpr>& terms);
MonotoneExpr product(const std::vector<MonotoneExpr>& factors);
MonotoneExpr power(const MonotoneExpr& child, double alpha);
MonotoneExpr complement(const MonotoneExpr& child);
MonotoneExpr affine_mix(const MonotoneExpr& child, double theta);
MonotoneExpr neg_log(const MonotoneExpr& child);
MonotoneExpr neg_log_complement(const MonotoneExpr& child);
MonotoneExpr scale(const MonotoneExpr& child, double c);
MonotoneExpr exp_neg(const MonotoneExpr& child);
/// num / den. The floor is derived from the denominator when `declared_floor`
/// is absent (<= 0); a declared floor is checked on a sampling lattice.
MonotoneExpr ratio(const MonotoneExpr& num, const MonotoneExpr& den, double declared_floor = 0.0);
MonotoneExpr opaque(OpaqueFunction fn, DirectionVector directions, Range range, std::string label);

}  // namespace gencdf::dsl
