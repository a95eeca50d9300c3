#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "gencdf/errors.hpp"

namespace gencdf {

/// A real number or one of the two infinities. NaN is never representable.
///
/// Only ordering, min/max and "evaluate a CDF at" are meaningful on the
/// infinities; asking for the finite value of an infinite ExtReal is a
/// domain error.
class ExtReal {
public:
    constexpr ExtReal() = default;
    ExtReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
        if (std::isnan(v)) throw DomainError("ExtReal cannot hold NaN");
    }

    static ExtReal pos_infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }
    static ExtReal neg_infinity() { return ExtReal(-std::numeric_limits<double>::infinity()); }

    bool is_finite() const noexcept { return std::isfinite(value_); }
    bool is_pos_infinity() const noexcept { return value_ == std::numeric_limits<double>::infinity(); }
    bool is_neg_infinity() const noexcept { return value_ == -std::numeric_limits<double>::infinity(); }

    /// The finite value; throws when infinite.
    double finite() const {
        if (!is_finite()) throw DomainError("arithmetic on an infinite ExtReal");
        return value_;
    }

    /// The IEEE representation, infinities included. Used by CDF evaluation.
    double raw() const noexcept { return value_; }

    friend bool operator==(const ExtReal&, const ExtReal&) = default;
    friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
        return a.value_ <=> b.value_;
    }

    std::string to_string() const;

private:
    double value_ = 0.0;
};

inline ExtReal min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }
inline ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

/// Equality with absolute tolerance on finite values; infinities compare exactly.
inline bool approx_equal(const ExtReal& a, const ExtReal& b, double tol) {
    if (!a.is_finite() || !b.is_finite()) return a == b;
    return std::fabs(a.raw() - b.raw()) <= tol;
}

/// Shortest round-trip decimal text ("inf" / "-inf" for the infinities).
std::string format_real(double v);

/// Locale-independent text with 17 significant digits, as used in CSV output.
std::string format_real17(double v);

}  // namespace gencdf
