#include "gencdf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <ostream>

#include "gencdf/analysis.hpp"
#include "gencdf/catalog.hpp"
#include "gencdf/errors.hpp"
#include "gencdf/spec_document.hpp"

namespace gencdf::cli {

namespace {

constexpr double kResidualLimit = 1e-8;
constexpr double kAgreementLimit = 1e-9;

// Maps library exceptions onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const QuadratureError& e) {
        err << "integrity error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

// Loads and builds; reports failed conditions and returns nullopt when the
// spec does not validate.
std::optional<GeneratedCdf> load_built(const std::filesystem::path& path, std::ostream& err) {
    const auto spec = load_spec(path);
    const auto report = validate(spec);
    if (!report.passed()) {
        err << "spec fails validation:";
        for (const auto& id : report.failed_ids()) err << ' ' << id;
        err << '\n';
        return std::nullopt;
    }
    return build(spec);
}

std::string params_text(const ParamList& p) {
    std::string s;
    for (const auto& [k, v] : p) s += (s.empty() ? "" : " ") + k + "=" + format_real(v);
    return s;
}

}  // namespace

int cmd_validate(const std::filesystem::path& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto report = validate(load_spec(spec));
        for (const auto& v : report.verdicts) {
            out << v.id << ": " << to_string(v.status);
            if (v.status == Status::Fail && !v.witness.empty()) out << " (" << v.witness << ")";
            out << '\n';
        }
        if (report.passed()) {
            out << "result: pass\n";
            return static_cast<int>(kOk);
        }
        out << "result: fail (";
        const auto failed = report.failed_ids();
        for (std::size_t i = 0; i < failed.size(); ++i) out << (i ? ", " : "") << failed[i];
        out << ")\n";
        return static_cast<int>(kValidationFailed);
    });
}

int cmd_curve(const std::filesystem::path& spec, double from, double to, long points, bool density,
              std::ostream& out, std::ostream& err) {
    if (points < 2) {
        err << "error: --points must be at least 2\n";
        return kUsage;
    }
    if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
        err << "error: need finite --from < --to\n";
        return kUsage;
    }
    return guarded(err, [&] {
        const auto h = load_built(spec, err);
        if (!h) return static_cast<int>(kValidationFailed);
        if (density && classify_nature(h->spec()).nature == Nature::Discrete) {
            err << "error: density requested for a discrete distribution\n";
            return static_cast<int>(kUsage);
        }
        std::string body = density ? "x,cdf,pdf\n" : "x,cdf\n";
        for (long i = 0; i < points; ++i) {
            const double x = i + 1 == points ? to : from + (to - from) * static_cast<double>(i) / (points - 1);
            body += format_real17(x) + "," + format_real17(h->eval_cdf(x));
            if (density) body += "," + format_real17(h->eval_density(x).value);
            body += '\n';
        }
        out << body;
        return static_cast<int>(kOk);
    });
}

int cmd_sample(const std::filesystem::path& spec, long count, std::uint64_t seed, std::ostream& out,
               std::ostream& err) {
    if (count < 0) {
        err << "error: -n must be nonnegative\n";
        return kUsage;
    }
    return guarded(err, [&] {
        const auto h = load_built(spec, err);
        if (!h) return static_cast<int>(kValidationFailed);
        std::string body;
        for (double x : h->sample(static_cast<std::size_t>(count), seed)) body += format_real17(x) + '\n';
        out << body;
        return static_cast<int>(kOk);
    });
}

int cmd_support(const std::filesystem::path& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto s = load_spec(spec);
        const auto exact = support_exact_if_T4(s);
        out << render(exact ? *exact : support_upper_bound(s)) << '\n';
        out << (exact ? "exact: yes (T4)" : "exact: no (upper bound, T3)") << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_nature(const std::filesystem::path& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        out << render(classify_nature(load_spec(spec))) << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_catalog_list(std::ostream& out) {
    for (const auto& name : catalog::list_entries()) out << name << '\n';
    return kOk;
}

int cmd_catalog_check(const std::string& name, long grid, std::ostream& out, std::ostream& err) {
    if (grid < 2) {
        err << "error: --grid must be at least 2\n";
        return kUsage;
    }
    return guarded(err, [&] {
        const auto& e = catalog::entry(name);
        const std::vector<std::pair<std::string, BaselineCdf>> gs{
            {"uniform01", make_uniform01()}, {"exponential(1)", make_exponential(1.0)}, {"normal(0,1)", make_normal(0.0, 1.0)}};
        bool ok = true;
        for (const auto& p : e.presets) {
            for (const auto& [gname, g] : gs) {
                for (std::size_t r = 0; r < e.routes.size(); ++r) {
                    const double res = catalog::reduction_residual(e, p, g, static_cast<std::size_t>(grid), r);
                    ok = ok && res <= kResidualLimit;
                    out << params_text(p) << " G=" << gname << " route=" << e.routes[r].subcase
                        << " residual=" << format_real(res) << '\n';
                }
                if (e.routes.size() > 1) {
                    const double agree = catalog::route_agreement(e, p, g, static_cast<std::size_t>(grid));
                    ok = ok && agree <= kAgreementLimit;
                    out << params_text(p) << " G=" << gname << " routes agree within " << format_real(agree) << '\n';
                }
            }
        }
        out << (ok ? "result: pass" : "result: fail") << '\n';
        return static_cast<int>(ok ? kOk : kValidationFailed);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Build, validate and evaluate distributions generated from baseline CDFs", "gencdf"};
    app.require_subcommand(1);

    std::string path;
    double from = 0.0, to = 1.0;
    long points = 101;
    bool density = false;
    long count = 1000;
    std::uint64_t seed = 1;
    std::string entry_name;
    long grid = 101;

    auto* validate_cmd = app.add_subcommand("validate", "Check the generator conditions");
    validate_cmd->add_option("spec", path, "Spec file")->required();

    auto* curve = app.add_subcommand("curve", "Emit H (and its density) as CSV");
    curve->add_option("spec", path, "Spec file")->required();
    curve->add_option("--from", from, "First x")->required();
    curve->add_option("--to", to, "Last x")->required();
    curve->add_option("--points", points, "Number of rows")->capture_default_str();
    curve->add_flag("--density", density, "Add a pdf column");

    auto* sample = app.add_subcommand("sample", "Draw samples by inverse transform");
    sample->add_option("spec", path, "Spec file")->required();
    sample->add_option("-n", count, "Sample size")->capture_default_str();
    sample->add_option("--seed", seed, "Random seed")->capture_default_str();

    auto* support = app.add_subcommand("support", "Print the support");
    support->add_option("spec", path, "Spec file")->required();

    auto* nature = app.add_subcommand("nature", "Classify the generated distribution");
    nature->add_option("spec", path, "Spec file")->required();

    auto* cat = app.add_subcommand("catalog", "Known classes and their reductions");
    cat->require_subcommand(1);
    auto* list = cat->add_subcommand("list", "List catalog entries");
    auto* check = cat->add_subcommand("check", "Compare every route with the closed form");
    check->add_option("name", entry_name, "Entry name")->required();
    check->add_option("--grid", grid, "Grid points")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (validate_cmd->parsed()) return cmd_validate(path, out, err);
    if (curve->parsed()) return cmd_curve(path, from, to, points, density, out, err);
    if (sample->parsed()) return cmd_sample(path, count, seed, out, err);
    if (support->parsed()) return cmd_support(path, out, err);
    if (nature->parsed()) return cmd_nature(path, out, err);
    if (list->parsed()) return cmd_catalog_list(out);
    if (check->parsed()) return cmd_catalog_check(entry_name, grid, out, err);
    return kUsage;
}

}  // namespace gencdf::cli
