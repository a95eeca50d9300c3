#include "gencdf/spec_document.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gencdf/errors.hpp"

namespace gencdf {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw DomainError(where + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw DomainError(where + " is missing '" + key + "'");
    return *it;
}

dsl::MonotoneExpr expression(const json& j, std::size_t m, const std::string& where) {
    if (!j.is_string()) throw DomainError(where + " must be a string");
    const auto text = j.get<std::string>();
    try {
        return dsl::parse(text, m);
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what(), e.offset());
    }
}

std::vector<dsl::MonotoneExpr> expression_list(const json& exprs, const char* key, std::size_t n, std::size_t m) {
    const json& list = field(exprs, key, "expressions");
    const std::string where = std::string("expressions.") + key;
    if (!list.is_array() || list.size() != n) {
        throw DomainError(where + " must be a list of n = " + std::to_string(n) + " strings");
    }
    std::vector<dsl::MonotoneExpr> out;
    for (std::size_t j = 0; j < n; ++j) out.push_back(expression(list[j], m, where + "[" + std::to_string(j) + "]"));
    return out;
}

BaselineCdf baseline(const json& j, const std::string& where) {
    const auto family = field(j, "family", where);
    if (!family.is_string()) throw DomainError(where + ".family must be a string");
    ParamList params;
    if (const auto it = j.find("params"); it != j.end()) {
        if (!it->is_object()) throw DomainError(where + ".params must be an object");
        for (const auto& [k, v] : it->items()) {
            if (!v.is_number()) throw DomainError(where + ".params." + k + " must be a number");
            params.emplace_back(k, v.get<double>());
        }
    }
    std::vector<Jump> jumps;
    if (const auto it = j.find("jumps"); it != j.end()) {
        if (!it->is_array()) throw DomainError(where + ".jumps must be a list of [location, mass] pairs");
        for (const auto& p : *it) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                throw DomainError(where + ".jumps must be a list of [location, mass] pairs");
            }
            jumps.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    try {
        return make_baseline(family.get<std::string>(), params, jumps);
    } catch (const DomainError& e) {
        throw DomainError(where + ": " + e.what());
    }
}

std::size_t positive_count(const json& doc, const char* key) {
    const json& v = field(doc, key, "spec");
    if (!v.is_number_integer() || v.get<long long>() < 1) throw DomainError(std::string(key) + " must be a positive integer");
    return v.get<std::size_t>();
}

json baseline_json(const BaselineCdf& b) {
    json out{{"family", b.family()}};
    if (!b.params().empty()) {
        json params = json::object();
        for (const auto& [k, v] : b.params()) params[k] = v;
        out["params"] = params;
    }
    if (b.is_discrete()) {
        json jumps = json::array();
        for (const auto& j : b.jumps()) jumps.push_back({j.location, j.mass});
        out["jumps"] = jumps;
    }
    return out;
}

}  // namespace

GeneratorSpec parse_spec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) throw DomainError("spec must be a JSON object");

    const json& form_j = field(doc, "form", "spec");
    if (!form_j.is_string()) throw DomainError("form must be \"direct\" or \"complementary\"");
    const auto form_s = form_j.get<std::string>();
    Form form;
    if (form_s == "direct") {
        form = Form::Direct;
    } else if (form_s == "complementary") {
        form = Form::Complementary;
    } else {
        throw DomainError("form must be \"direct\" or \"complementary\", got \"" + form_s + "\"");
    }
    const std::size_t n = positive_count(doc, "n");
    const std::size_t m = positive_count(doc, "m");
    if (n > kMaxTerms) throw DomainError("n must not exceed 64");

    const json& gs_j = field(doc, "baselines_g", "spec");
    if (!gs_j.is_array() || gs_j.size() != m) {
        throw DomainError("baselines_g must list m = " + std::to_string(m) + " baselines");
    }
    std::vector<BaselineCdf> gs;
    for (std::size_t i = 0; i < m; ++i) gs.push_back(baseline(gs_j[i], "baselines_g[" + std::to_string(i) + "]"));
    BaselineCdf f = baseline(field(doc, "baseline_f", "spec"), "baseline_f");

    const json& exprs = field(doc, "expressions", "spec");
    auto u = expression(field(exprs, "U", "expressions"), m, "expressions.U");
    auto v = expression(field(exprs, "V", "expressions"), m, "expressions.V");
    const auto upper = expression_list(exprs, "upper", n, m);
    const auto lower = expression_list(exprs, "lower", n, m);
    const auto m_lower = expression_list(exprs, "m_lower", n, m);
    const auto v_upper = expression_list(exprs, "v_upper", n, m);
    std::vector<LimitSet> limits;
    for (std::size_t j = 0; j < n; ++j) limits.push_back(LimitSet{upper[j], lower[j], m_lower[j], v_upper[j]});

    GeneratorSpec spec{form, std::move(u), std::move(v), std::move(limits), std::move(f), std::move(gs)};
    check_structure(spec);
    return spec;
}

GeneratorSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open spec file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string write_spec(const GeneratorSpec& spec) {
    json exprs{{"U", spec.scale_u.to_string()}, {"V", spec.scale_v.to_string()}};
    json upper = json::array(), lower = json::array(), m_lower = json::array(), v_upper = json::array();
    for (const auto& l : spec.limits) {
        upper.push_back(l.upper.to_string());
        lower.push_back(l.lower.to_string());
        m_lower.push_back(l.m_lower.to_string());
        v_upper.push_back(l.v_upper.to_string());
    }
    exprs["upper"] = upper;
    exprs["lower"] = lower;
    exprs["m_lower"] = m_lower;
    exprs["v_upper"] = v_upper;
    json gs = json::array();
    for (const auto& g : spec.baselines_g) gs.push_back(baseline_json(g));
    json doc{{"form", to_string(spec.form)},
             {"n", spec.n()},
             {"m", spec.m()},
             {"expressions", exprs},
             {"baseline_f", baseline_json(spec.baseline_f)},
             {"baselines_g", gs}};
    return doc.dump(2);
}

}  // namespace gencdf
