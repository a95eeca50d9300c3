#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gencdf/generator.hpp"

namespace gencdf {

/// Reads a generator spec from its JSON text form:
///
///   {"form": "direct" | "complementary", "n": 1, "m": 1,
///    "expressions": {"U": "1", "V": "0",
///                    "upper": ["g1"], "lower": ["0"],
///                    "m_lower": ["0"], "v_upper": ["0"]},
///    "baseline_f": {"family": "beta", "params": {"a": 2, "b": 2}},
///    "baselines_g": [{"family": "uniform01"}]}
///
/// Discrete baselines list their atoms as "jumps": [[location, mass], ...].
/// JSON syntax errors raise ParseError with the byte offset; expression
/// errors raise ParseError naming the field; semantic problems raise
/// DomainError.
GeneratorSpec parse_spec(std::string_view text);

GeneratorSpec load_spec(const std::filesystem::path& path);

/// Inverse of parse_spec; throws DomainError for opaque expressions.
std::string write_spec(const GeneratorSpec& spec);

}  // namespace gencdf
