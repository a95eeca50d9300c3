#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace gencdf::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidationFailed = 2, kIntegrity = 3 };

/// One "id: status" line per condition, then "result: pass" or
/// "result: fail (ids)".
int cmd_validate(const std::filesystem::path& spec, std::ostream& out, std::ostream& err);

/// CSV "x,cdf[,pdf]" with `points` equally spaced x in [from, to].
int cmd_curve(const std::filesystem::path& spec, double from, double to, long points, bool density,
              std::ostream& out, std::ostream& err);

int cmd_sample(const std::filesystem::path& spec, long count, std::uint64_t seed, std::ostream& out,
               std::ostream& err);

int cmd_support(const std::filesystem::path& spec, std::ostream& out, std::ostream& err);

int cmd_nature(const std::filesystem::path& spec, std::ostream& out, std::ostream& err);

int cmd_catalog_list(std::ostream& out);

/// Residual of every route for every preset over uniform01, exponential(1)
/// and normal(0, 1); exit 0 iff all are <= 1e-8 and routes agree within 1e-9.
int cmd_catalog_check(const std::string& name, long grid, std::ostream& out, std::ostream& err);

/// Parses the command line and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gencdf::cli
