#include "specrad/serialize.hpp"

#include <cmath>

#include "specrad/errors.hpp"

namespace specrad {

nlohmann::json json_number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

namespace {

double read_number(const nlohmann::json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        throw SchemaError("expected a number, got \"" + s + "\"");
    }
    if (!j.is_number())
        throw SchemaError("expected a number");
    return j.get<double>();
}

nlohmann::json numbers(const std::vector<double>& v) {
    auto a = nlohmann::json::array();
    for (double x : v)
        a.push_back(json_number(x));
    return a;
}

Certificate certificate_from_json(const nlohmann::json& j) {
    Certificate c;
    c.label = j.at("label").get<std::string>();
    for (const auto& x : j.at("index"))
        c.index.push_back(read_number(x));
    for (const auto& x : j.at("values"))
        c.values.push_back(read_number(x));
    return c;
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass")
        return Verdict::Pass;
    if (s == "fail")
        return Verdict::Fail;
    if (s == "inconclusive")
        return Verdict::Inconclusive;
    throw SchemaError("unknown verdict " + s);
}

}  // namespace

nlohmann::json to_json(const Certificate& c) {
    return {{"label", c.label}, {"index", numbers(c.index)}, {"values", numbers(c.values)}};
}

nlohmann::json to_json(const SpectralEstimate& e) {
    nlohmann::json j = {{"target", to_string(e.target)},
                        {"method", e.method},
                        {"lower", json_number(e.lower)},
                        {"upper", json_number(e.upper)},
                        {"lower_certificate", to_json(e.lower_certificate)},
                        {"upper_certificate", to_json(e.upper_certificate)},
                        {"complete", e.complete}};
    if (e.estimate) {
        j["estimate"] = json_number(*e.estimate);
        j["estimate_label"] = e.estimate_label;
    }
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [k, v] : e.diagnostics)
        d[k] = numbers(v);
    j["diagnostics"] = d;
    return j;
}

nlohmann::json to_json(const Quantity& q) {
    nlohmann::json j = {{"name", q.name},
                        {"lower", json_number(q.lower)},
                        {"upper", json_number(q.upper)},
                        {"exact", q.exact},
                        {"method", q.method},
                        {"lower_certificate", to_json(q.lower_certificate)},
                        {"upper_certificate", to_json(q.upper_certificate)}};
    if (q.estimate)
        j["estimate"] = json_number(*q.estimate);
    return j;
}

nlohmann::json to_json(const Comparison& c) {
    const bool certified_mode = c.mode == ComparisonMode::Certified;
    return {{"lhs", c.lhs},
            {"rhs", c.rhs},
            {"relation", c.strict ? "<" : "<="},
            {"lhs_bound", certified_mode ? "upper" : "lower"},
            {"rhs_bound", certified_mode ? "lower" : "upper"},
            {"verdict", to_string(c.verdict)},
            {"margin", json_number(c.margin)},
            {"certified", c.certified},
            {"note", c.note}};
}

nlohmann::json to_json(const ExperimentReport& r) {
    auto qs = nlohmann::json::array();
    for (const auto& q : r.quantities)
        qs.push_back(to_json(q));
    auto cs = nlohmann::json::array();
    for (const auto& c : r.comparisons)
        cs.push_back(to_json(c));
    return {{"id", r.id},
            {"kind", r.kind},
            {"group", r.group},
            {"inputs", r.inputs},
            {"quantities", qs},
            {"comparisons", cs},
            {"verdict", to_string(r.verdict)},
            {"margin", json_number(r.margin)},
            {"tolerance", r.tolerance},
            {"budget_exhausted", r.budget_exhausted},
            {"notes", r.notes},
            {"details", r.details}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
    try {
        ExperimentReport r;
        r.id = j.at("id").get<std::string>();
        r.kind = j.at("kind").get<std::string>();
        r.group = j.at("group").get<std::string>();
        r.inputs = j.at("inputs");
        for (const auto& qj : j.at("quantities")) {
            Quantity q;
            q.name = qj.at("name").get<std::string>();
            q.lower = read_number(qj.at("lower"));
            q.upper = read_number(qj.at("upper"));
            q.exact = qj.at("exact").get<bool>();
            q.method = qj.at("method").get<std::string>();
            q.lower_certificate = certificate_from_json(qj.at("lower_certificate"));
            q.upper_certificate = certificate_from_json(qj.at("upper_certificate"));
            if (qj.contains("estimate"))
                q.estimate = read_number(qj.at("estimate"));
            r.quantities.push_back(std::move(q));
        }
        for (const auto& cj : j.at("comparisons")) {
            Comparison c;
            c.lhs = cj.at("lhs").get<std::string>();
            c.rhs = cj.at("rhs").get<std::string>();
            auto rel = cj.at("relation").get<std::string>();
            if (rel != "<" && rel != "<=")
                throw SchemaError("unknown relation " + rel);
            const auto lb = cj.at("lhs_bound").get<std::string>();
            const auto rb = cj.at("rhs_bound").get<std::string>();
            if (lb == "upper" && rb == "lower")
                c.mode = ComparisonMode::Certified;
            else if (lb == "lower" && rb == "upper")
                c.mode = ComparisonMode::Consistent;
            else
                throw SchemaError("comparison reads two " + lb + "/" + rb + " bounds; directions must be opposite");
            c.strict = rel == "<";
            c.certified = cj.at("certified").get<bool>();
            c.verdict = verdict_from_string(cj.at("verdict").get<std::string>());
            c.margin = read_number(cj.at("margin"));
            c.note = cj.at("note").get<std::string>();
            r.comparisons.push_back(std::move(c));
        }
        r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        r.margin = read_number(j.at("margin"));
        r.tolerance = j.at("tolerance").get<double>();
        r.budget_exhausted = j.at("budget_exhausted").get<bool>();
        r.notes = j.at("notes").get<std::vector<std::string>>();
        r.details = j.at("details");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed report: ") + e.what());
    }
}

nlohmann::json algebra_to_json(const AlgebraElement& f) {
    auto a = nlohmann::json::array();
    for (const auto& [x, c] : f.terms())
        a.push_back({f.group().format(x), c.real(), c.imag()});
    return a;
}

AlgebraElement algebra_from_json(const Group& g, const nlohmann::json& j) {
    if (!j.is_array())
        throw SchemaError("element must be a list of [word, re, im] triples");
    std::vector<AlgebraElement::Term> terms;
    for (const auto& t : j) {
        if (!t.is_array() || t.size() < 2 || t.size() > 3 || !t[0].is_string())
            throw SchemaError("element entries must be [word, re] or [word, re, im]");
        double re = read_number(t[1]);
        double im = t.size() == 3 ? read_number(t[2]) : 0.0;
        if (!std::isfinite(re) || !std::isfinite(im))
            throw SchemaError("element coefficients must be finite");
        try {
            terms.emplace_back(g.parse(t[0].get<std::string>()), Complex(re, im));
        } catch (const InvalidInput& e) {
            throw SchemaError(e.what());
        }
    }
    return AlgebraElement(g, std::move(terms));
}

}  // namespace specrad
