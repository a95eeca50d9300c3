#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gencdf/ext_real.hpp"
#include "gencdf/generator.hpp"

namespace gencdf {

struct SupportInterval {
    ExtReal lo;
    ExtReal hi;
    bool lo_closed = true;  // finite endpoints are reported closed
    bool hi_closed = true;
};

struct SupportSet {
    std::vector<SupportInterval> intervals;  // sorted, disjoint
    std::vector<double> atoms;               // sorted, outside every interval
};

/// Sorts, merges touching intervals and drops atoms already covered.
SupportSet normalized(SupportSet s);

/// "intervals: [0, 1], [2, 3]" then "atoms: 0.5, 2" (or "none").
std::string render(const SupportSet& s);

/// Every interval and atom of `inner` lies in `outer` widened by `resolution`.
bool contains(const SupportSet& outer, const SupportSet& inner, double resolution);

/// Same intervals and atoms up to `resolution`; an infinite endpoint of
/// `exact` matches any endpoint beyond the other side's finite values.
bool agrees(const SupportSet& exact, const SupportSet& scanned, double resolution);

/// Union of the baseline supports, which always contains the support of H.
SupportSet support_upper_bound(const GeneratorSpec& spec);

/// The union support when F has convex support and one of the two boundary
/// branches holds with a syntactically strict limit map; nullopt otherwise.
std::optional<SupportSet> support_exact_if_T4(const GeneratorSpec& spec);

/// Where H increases: a grid over the hull of the baseline supports
/// (infinite ends cut at the 1e-12 quantiles), runs of cells rising by more
/// than 1e-10, widened over adjacent cells with any rise and refined by
/// bisection to 1e-8. Runs narrower than 1e-6
/// are reported as atoms.
SupportSet numeric_support_scan(const GeneratedCdf& h, std::size_t grid_points);

enum class Nature { Discrete, ContinuousCdf, ContinuousRv, Mixed, Unknown };

const char* to_string(Nature n);

struct NatureVerdict {
    Nature nature;
    std::string justification;  // "C3.1", "T5", "T6", "T7" or empty
};

NatureVerdict classify_nature(const GeneratorSpec& spec);

/// "nature: discrete (C3.1)", or "nature: unknown" without a justification.
std::string render(const NatureVerdict& v);

}  // namespace gencdf
