// specrad-lab: experiment runner for the spectral-radius laboratory.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specrad/errors.hpp"
#include "specrad/runner.hpp"

using nlohmann::json;
using namespace specrad;

namespace {

struct Global {
    std::size_t jobs = 1;
    std::optional<std::string> out;
    std::optional<double> tolerance;
    std::optional<std::size_t> budget_elems;

    RunOptions options() const { return {jobs, tolerance, budget_elems}; }
};

int execute(const RunConfig& config, const Global& g) {
    auto result = run_jobs(config, g.options());
    auto dir = resolve_out_dir(g.out, config);
    write_outputs(result, dir);
    for (const auto& r : result.results) {
        std::string verdict = r.status == RunStatus::Completed ? to_string(r.report.verdict) : to_string(r.status);
        std::printf("%-28s %-16s %-14s margin %.6g\n", r.report.id.c_str(), r.report.kind.c_str(), verdict.c_str(),
                    r.report.margin);
        for (const auto& n : r.report.notes)
            std::printf("    note: %s\n", n.c_str());
    }
    std::printf("%zu report(s) in %s\n", result.results.size(), dir.string().c_str());
    return result.exit_code();
}

json preset(const std::string& kind, const std::string& group, json fields) {
    fields["id"] = kind + "-" + group;
    fields["kind"] = kind;
    fields["group"] = group;
    return {{"schema", kConfigSchema}, {"experiments", json::array({fields})}};
}

json element_file(const std::string& path) { return {{"file", path}}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified spectral-radius brackets and inequality checks on group algebras"};
    app.fallthrough();
    app.require_subcommand(1);

    Global g;
    app.add_option("--jobs", g.jobs, "Experiments run concurrently")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory (default: $SPECRAD_LAB_OUT, config 'out', specrad-out)");
    app.add_option("--tolerance", g.tolerance, "Relative comparison tolerance")->check(CLI::NonNegativeNumber);
    app.add_option("--budget-elems", g.budget_elems, "Element cap for supports, product sets and balls")
        ->check(CLI::PositiveNumber);

    std::optional<json> config;
    std::string config_path;

    auto* run = app.add_subcommand("run", "Run the experiments listed in a JSON config");
    run->add_option("config", config_path, "Config file")->required();

    auto* list = app.add_subcommand("list-catalog", "List catalog groups and experiment kinds");

    std::string group;
    std::vector<std::string> generators;
    std::string element;
    std::vector<std::string> exponents;

    auto* growth = app.add_subcommand("growth", "Product-set sizes and the growth-rate bracket");
    std::size_t levels = 12;
    growth->add_option("group", group)->required();
    growth->add_option("--levels", levels, "Number of product sets");
    growth->add_option("--generators", generators, "Generator words (e is added)");

    auto* spectrum = app.add_subcommand("spectrum", "Radius and norm brackets for one element");
    spectrum->add_option("group", group)->required();
    spectrum->add_option("--element", element, "JSON file with [word, re, im] triples (default h_S)");
    spectrum->add_option("--exponent", exponents, "PF*_p exponents, e.g. 3/2");
    spectrum->add_option("--generators", generators, "Generator words (e is added)");

    auto* kesten = app.add_subcommand("kesten", "Kesten probe for h_S");
    std::size_t moments = 12, radius = 6;
    kesten->add_option("group", group)->required();
    kesten->add_option("--moments", moments, "Trace moments m_2n, n <= N");
    kesten->add_option("--radius", radius, "Truncation radius");
    kesten->add_option("--generators", generators, "Generator words (e is added)");

    auto* jenkins = app.add_subcommand("jenkins", "Jenkins witness over a free semigroup");
    std::size_t n_max = 10;
    std::string s_word, t_word;
    jenkins->add_option("group", group)->required();
    jenkins->add_option("--n-max", n_max, "Largest power checked");
    jenkins->add_option("-s", s_word, "Word for s");
    jenkins->add_option("-t", t_word, "Word for t");

    auto* interp = app.add_subcommand("interpolate", "PF*_p interpolation inequality");
    std::vector<std::string> triple;
    interp->add_option("group", group)->required();
    interp->add_option("--element", element, "JSON file with [word, re, im] triples (default h_S)");
    interp->add_option("--triple", triple, "p1 p2 p3")->expected(3);

    auto* pytlik = app.add_subcommand("pytlik", "Weighted, unweighted and exact radius on a tower");
    std::size_t doublings = 7, terms = 6, pool_radius = 6;
    std::uint64_t seed = 1;
    pytlik->add_option("group", group)->required();
    pytlik->add_option("--element", element, "JSON file with [word, re, im] triples");
    pytlik->add_option("--doublings", doublings, "Power doublings");
    pytlik->add_option("--seed", seed, "Seed for the random Hermitian element");
    pytlik->add_option("--terms", terms, "Points in the random element");
    pytlik->add_option("--pool-radius", pool_radius, "Radius of the element pool");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*list) {
            std::cout << catalog_listing();
            return 0;
        }
        if (*run) {
            auto rc = load_config(config_path, g.options());
            return execute(rc, g);
        }

        json fields = json::object();
        if (!generators.empty())
            fields["generators"] = generators;
        if (!element.empty())
            fields["element"] = element_file(element);
        std::string kind;
        if (*growth) {
            kind = "growth";
            fields["levels"] = levels;
        } else if (*spectrum) {
            kind = "spectrum";
            if (!exponents.empty())
                fields["exponents"] = exponents;
        } else if (*kesten) {
            kind = "kesten";
            fields["budgets"] = {{"max_moments", moments}, {"radius", radius}};
        } else if (*jenkins) {
            kind = "jenkins";
            fields["n_max"] = n_max;
            if (!s_word.empty())
                fields["s"] = s_word;
            if (!t_word.empty())
                fields["t"] = t_word;
        } else if (*interp) {
            kind = "interpolate";
            if (!triple.empty())
                fields["triples"] = json::array({triple});
        } else if (*pytlik) {
            kind = "pytlik";
            fields["doublings"] = doublings;
            if (element.empty())
                fields["element"] = {{"random", {{"terms", terms}, {"radius", pool_radius}, {"seed", seed}}}};
        }
        auto rc = parse_config(preset(kind, group, fields), ".", g.options());
        return execute(rc, g);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
