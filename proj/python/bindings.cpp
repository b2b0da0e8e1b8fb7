#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specrad/errors.hpp"
#include "specrad/growth.hpp"
#include "specrad/lab.hpp"
#include "specrad/runner.hpp"
#include "specrad/serialize.hpp"
#include "specrad/spectral.hpp"

namespace py = pybind11;
using namespace specrad;

namespace {

GeneratingSet make_set(const std::string& group, const std::optional<std::vector<std::string>>& words,
                       bool with_identity) {
    const Group& g = catalog_group(group);
    if (!words)
        return GeneratingSet::standard(g, with_identity);
    auto S = GeneratingSet::from_words(g, *words);
    return with_identity ? S.with_identity() : S;
}

py::dict estimate_dict(const SpectralEstimate& e) {
    py::dict d;
    d["lower"] = e.lower;
    d["upper"] = e.upper;
    d["lower_certificate"] = e.lower_certificate.values;
    d["upper_certificate"] = e.upper_certificate.values;
    d["estimate"] = e.estimate;
    d["method"] = e.method;
    d["complete"] = e.complete;
    return d;
}

}  // namespace

PYBIND11_MODULE(_specrad, m) {
    m.doc() = "Spectral-radius brackets on group algebras";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

    m.def("catalog_names", &catalog_names);
    m.def("catalog_listing", &catalog_listing);
    m.def("experiment_kinds", &experiment_kinds);

    m.def(
        "growth_sizes",
        [](const std::string& group, std::size_t levels, std::optional<std::vector<std::string>> generators,
           bool with_identity, std::size_t max_elements) {
            auto S = make_set(group, generators, with_identity);
            py::gil_scoped_release release;
            return product_set_sequence(S, levels, {max_elements, false}).sizes;
        },
        py::arg("group"), py::arg("levels"), py::arg("generators") = py::none(), py::arg("with_identity") = true,
        py::arg("max_elements") = 50'000'000,
        "|S^n| for n = 1..levels; S defaults to the standard generators with inverses.");

    m.def(
        "kesten_moments",
        [](const std::string& group, std::size_t max_n, bool with_identity) {
            auto S = make_set(group, std::nullopt, with_identity);
            auto h = AlgebraElement::normalized_indicator(S);
            SpectralEstimate e;
            {
                py::gil_scoped_release release;
                e = cstar_radius_hermitian(h, max_n);
            }
            return estimate_dict(e);
        },
        py::arg("group"), py::arg("max_n"), py::arg("with_identity") = false,
        "Trace-moment bracket for r(h_S) with S the standard symmetric generators.");

    m.def(
        "circle_sup",
        [](Complex a0, Complex a1, Complex a2) {
            auto e = circle_sup({a0, a1, a2});
            return py::make_tuple(e.lower, e.upper);
        },
        py::arg("a0"), py::arg("a1"), py::arg("a2"), "Bracket for sup |a0 + a1 z + a2 z^2| on the unit circle.");

    m.def(
        "run_config",
        [](const std::string& config_json, std::size_t jobs, const std::string& base_dir) {
            RunOptions opt;
            opt.jobs = jobs;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::exception& e) {
                throw SchemaError(e.what());
            }
            auto rc = parse_config(j, base_dir, opt);
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run_jobs(rc, opt);
            }
            std::vector<std::string> docs;
            for (const auto& r : res.results)
                docs.push_back(report_document(r).dump());
            return py::make_tuple(res.exit_code(), docs);
        },
        py::arg("config_json"), py::arg("jobs") = 1, py::arg("base_dir") = ".",
        "Runs a config given as a JSON string; returns (exit_code, [report JSON strings]).");
}
