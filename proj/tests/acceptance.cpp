// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <tuple>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "specrad/algebra.hpp"
#include "specrad/errors.hpp"
#include "specrad/fourier.hpp"
#include "specrad/growth.hpp"
#include "specrad/lab.hpp"
#include "specrad/runner.hpp"
#include "specrad/serialize.hpp"
#include "specrad/spectral.hpp"
#include "specrad/weights.hpp"

using namespace specrad;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = s <= budget_s;
    bool ok = o.pass && in_time;
    if (!ok)
        ++failures;
    std::printf("criterion %d %s: %s | %s | %.1f s (limit %.0f s)%s\n", id, title, ok ? "PASS" : "FAIL",
                o.summary.c_str(), s, budget_s, in_time ? "" : " over time");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Closed walks of length 2n on the 2k-regular tree, by distance from the root.
double tree_return_probability(int k, int two_n) {
    std::vector<double> p(static_cast<std::size_t>(two_n) + 2, 0.0);
    p[0] = 1.0;
    const double deg = 2.0 * k;
    for (int step = 0; step < two_n; ++step) {
        std::vector<double> q(p.size(), 0.0);
        q[1] += p[0];
        for (std::size_t d = 1; d + 1 < p.size(); ++d) {
            q[d - 1] += p[d] / deg;
            q[d + 1] += p[d] * (deg - 1) / deg;
        }
        p = q;
    }
    return p[0];
}

Outcome jenkins_gap() {
    const Group& F2 = catalog_group("free.F2");
    auto r = jenkins_witness(F2, F2.parse("a"), F2.parse("b"), {}, 10);
    const double target = std::sqrt(5.0) / 3.0;
    const auto& cs = r.quantity("circle_sup");
    auto sizes = r.details["support_sizes"].get<std::vector<double>>();
    auto norms = r.details["l1_norms"].get<std::vector<double>>();
    bool sizes_ok = sizes.size() == 10;
    for (std::size_t n = 0; n < sizes.size(); ++n)
        sizes_ok = sizes_ok && sizes[n] == std::pow(3.0, static_cast<double>(n + 1));
    double worst_norm = 0.0;
    for (double v : norms)
        worst_norm = std::max(worst_norm, std::abs(v - 1.0));
    bool sup_ok = std::abs(cs.lower - target) <= 1e-9 && std::abs(cs.upper - target) <= 1e-9;
    double max_moment = 0.0;
    for (double v : r.details["g_moment_lower_bounds"].get<std::vector<double>>())
        max_moment = std::max(max_moment, v);
    bool moments_ok = max_moment <= 5.0 / 9.0 + 1e-6;
    Outcome o;
    o.pass = sizes_ok && sup_ok && moments_ok && r.verdict == Verdict::Pass;
    o.summary = "|supp f^n| = 3^n for n <= 10: " + std::string(sizes_ok ? "yes" : "no") +
                fmt(", max | ||f^n||_1 - 1 | = %.2e", worst_norm) + fmt(", circle_sup in [%.12f", cs.lower) +
                fmt(", %.12f]", cs.upper) + fmt(" (sqrt5/3 = %.12f, tol 1e-9)", target) +
                fmt(", max g-moment bound %.6f", max_moment) + fmt(" <= 5/9 + 1e-6 = %.6f", 5.0 / 9.0 + 1e-6) +
                ", report verdict " + to_string(r.verdict);
    return o;
}

Outcome kesten_value() {
    const Group& F2 = catalog_group("free.F2");
    auto S = GeneratingSet::standard(F2, false);
    auto h = AlgebraElement::normalized_indicator(S);
    auto e = cstar_radius_hermitian(h, 12);
    const double target = std::sqrt(3.0) / 2.0;
    double rel = std::abs(*e.estimate - target) / target;
    double max_lower = 0.0;
    for (double v : e.lower_certificate.values)
        max_lower = std::max(max_lower, v);
    // Moments against the tree recursion, 2n = 2..24.
    const auto& m = e.diagnostics.at("moments");
    double worst = 0.0;
    for (std::size_t n = 1; n <= m.size(); ++n) {
        double exact = tree_return_probability(2, static_cast<int>(2 * n));
        worst = std::max(worst, std::abs(m[n - 1] - exact) / exact);
    }
    Outcome o;
    o.pass = rel <= 0.02 && max_lower < 0.8661 && worst <= 1e-12 && m.size() == 12;
    o.summary = fmt("extrapolated %.6f", *e.estimate) + fmt(" vs sqrt3/2 = %.6f", target) +
                fmt(", rel err %.4f (tol 0.02)", rel) + fmt(", max lower certificate %.6f < 0.8661", max_lower) +
                fmt(", moments 2n <= 24 vs tree recursion rel err %.1e (tol 1e-12)", worst);
    return o;
}

Outcome abelian_exactness() {
    const Group& Z = catalog_group("locfin.Z2sum");
    auto pool = element_pool(Z, 6);
    std::mt19937_64 rng(20240301);
    double worst = 0.0;
    std::size_t count = 0;
    for (int i = 0; i < 100; ++i) {
        auto f = random_hermitian(Z, pool, 8, rng, true);
        auto l1 = l1_spectral_radius(f, 7);
        double c7 = l1.upper_certificate.values.back();
        double exact = abelian_spectral_radius_exact(f).upper;
        worst = std::max(worst, std::abs(c7 - exact));
        ++count;
    }
    Outcome o;
    o.pass = worst <= 5e-3 && count == 100 && pool.size() == 64;
    o.summary = fmt("%.0f random Hermitian f on a 2^6 block", static_cast<double>(count)) +
                fmt(", max | ||f^128||_1^(1/128) - max|f^| | = %.2e (tol 5e-3)", worst);
    return o;
}

Outcome growth_rates() {
    const Group& F2 = catalog_group("free.F2");
    auto f2 = growth_rate_estimate(product_set_sequence(GeneratingSet::standard(F2), 10));
    double f2_dev = 0.0;
    for (double v : f2.diagnostics.at("sphere_ratio"))
        f2_dev = std::max(f2_dev, std::abs(v - 3.0));
    f2_dev = std::max(f2_dev, std::abs(*f2.estimate - 3.0));

    auto z2 = growth_rate_estimate(product_set_sequence(GeneratingSet::standard(catalog_group("abelian.Z2")), 30));
    double z2_ratio = z2.diagnostics.at("size_ratio").back();

    auto h = product_set_sequence(GeneratingSet::standard(catalog_group("heisenberg.H3Z")), 20);
    double slope = (std::log(static_cast<double>(h.sizes[19])) - std::log(static_cast<double>(h.sizes[9]))) /
                   std::log(2.0);
    Outcome o;
    o.pass = f2_dev <= 1e-9 && *z2.estimate <= 1.1 && z2_ratio <= 1.1 && slope >= 3.5 && slope <= 4.5;
    o.summary = fmt("F2 max |ratio - 3| = %.1e (tol 1e-9)", f2_dev) +
                fmt(", Z2 ratio at n = 30: %.4f", z2_ratio) + fmt(" (shell ratio %.4f, limit 1.1)", *z2.estimate) +
                fmt(", H3 log-log slope over [10, 20] = %.3f (window [3.5, 4.5])", slope);
    return o;
}

Outcome inequality_grid() {
    const std::vector<Exponent> ps = {Exponent::parse("5/4"), Exponent::parse("4/3"), Exponent::parse("3/2"),
                                      Exponent::parse("5/3"), Exponent::parse("7/4")};
    LabOptions opt;
    opt.lp.radius = 2;
    opt.lp.power_iters = 4;
    opt.lp.u2_doublings = 2;
    opt.lp.ball_budget = 5000;
    opt.lp.vector_budget = 5000;
    opt.lp.policy.max_support = 50000;
    opt.radius = 4;
    opt.truncation.max_ball = 200000;

    std::size_t checks = 0, fails = 0, inconclusive = 0, proven = 0;
    std::size_t chain_checks = 0, interp_checks = 0, lemma_checks = 0;
    std::size_t chain_inc = 0, interp_inc = 0, lemma_inc = 0;
    std::string first_failure;
    auto tally = [&](const ExperimentReport& r, std::size_t& kind_count, std::size_t& kind_inc) {
        ++checks;
        ++kind_count;
        proven += r.certified() ? 1 : 0;
        if (r.verdict == Verdict::Fail) {
            ++fails;
            if (first_failure.empty())
                first_failure = r.kind + " on " + r.group + " " + r.inputs.dump();
        } else if (r.verdict == Verdict::Inconclusive) {
            ++inconclusive;
            ++kind_inc;
        }
    };

    std::mt19937_64 rng(5150);
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        auto pool = element_pool(g, 2);
        for (int i = 0; i < 50; ++i) {
            auto f = random_hermitian(g, pool, 3, rng);
            GeneratingSet S = GeneratingSet(g, f.support()).symmetrized().with_identity();
            for (const auto& r : growth_chain_grid(f, S, ps, 6, opt))
                tally(r, chain_checks, chain_inc);
            std::vector<SpectralEstimate> pf;
            for (const auto& p : ps)
                pf.push_back(pfstar_norm_bounds(f, p, opt.lp));
            for (std::size_t a = 0; a < ps.size(); ++a)
                for (std::size_t b = a + 1; b < ps.size(); ++b)
                    for (std::size_t c = b + 1; c < ps.size(); ++c) {
                        auto ip = InterpolationParams::make(ps[a], ps[b], ps[c]);
                        auto r = interpolation_from_brackets(pf[a], pf[b], pf[c], ip, opt.tol);
                        r.group = name;
                        tally(r, interp_checks, interp_inc);
                    }
        }
        auto S = GeneratingSet::standard(g, true);
        for (const auto& p : ps)
            tally(check_kesten_growth_lemma(S, p, opt), lemma_checks, lemma_inc);
    }
    double rate = static_cast<double>(inconclusive) / static_cast<double>(checks);
    auto pct = [](std::size_t a, std::size_t b) { return b ? 100.0 * static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    Outcome o;
    o.pass = fails == 0 && rate < 0.30;
    o.summary = fmt("%.0f checks", static_cast<double>(checks)) + fmt(", certified failures %.0f", static_cast<double>(fails)) +
                fmt(", inconclusive %.1f%% (target < 30%%)", 100.0 * rate) +
                fmt("; chain %.1f%%", pct(chain_inc, chain_checks)) +
                fmt(", interpolation %.1f%%", pct(interp_inc, interp_checks)) +
                fmt(", growth lemma %.1f%% inconclusive", pct(lemma_inc, lemma_checks)) +
                fmt("; proven by the brackets %.1f%%", pct(proven, checks));
    if (!first_failure.empty())
        o.summary += "; first failure: " + first_failure;
    return o;
}

Outcome pytlik_equality() {
    double worst = 0.0;
    std::size_t count = 0, agreeing = 0;
    std::mt19937_64 rng(77);
    for (const char* name : {"locfin.Z2sum", "locfin.Sinf"}) {
        const Group& g = catalog_group(name);
        auto pool = element_pool(g, 10);
        auto w = build_pytlik_weight(g);
        for (int i = 0; i < 20; ++i) {
            auto f = random_hermitian(g, pool, 6, rng);
            auto r = check_pytlik_radius_equality(f, w, 7, 5e-3);
            worst = std::max({worst, r.details["l1_deviation"].get<double>(),
                              r.details["weighted_deviation"].get<double>()});
            ++count;
            agreeing += r.details["agreement"].get<bool>() && r.verdict == Verdict::Pass ? 1 : 0;
        }
    }
    Outcome o;
    o.pass = count == 40 && agreeing == count && worst <= 5e-3;
    o.summary = fmt("%.0f elements on Z2sum (2^6 block) and S5", static_cast<double>(count)) +
                fmt(", agreeing %.0f", static_cast<double>(agreeing)) +
                fmt(", max deviation from the exact radius %.2e (tol 5e-3, 7 doublings)", worst);
    return o;
}

Outcome property_suites() {
    std::mt19937_64 rng(99);
    std::size_t violations = 0, checked = 0;
    std::string first;
    auto note = [&](bool ok, const std::string& what) {
        ++checked;
        if (!ok) {
            ++violations;
            if (first.empty())
                first = what;
        }
    };
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        auto pool = element_pool(g, 3);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (int i = 0; i < 2000; ++i) {
            const auto& a = pool[pick(rng)];
            const auto& b = pool[pick(rng)];
            const auto& c = pool[pick(rng)];
            note(g.multiply(g.multiply(a, b), c) == g.multiply(a, g.multiply(b, c)), "associativity in " + name);
            note(g.is_identity(g.multiply(a, g.inverse(a))), "inverse law in " + name);
        }
        auto small = element_pool(g, 2);
        for (int i = 0; i < 5; ++i) {
            auto f = random_hermitian(g, small, 3, rng);
            auto u = random_hermitian(g, pool, 4, rng);
            auto v = random_hermitian(g, pool, 4, rng);
            for (double p : {1.0, 1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()})
                note(p_norm(convolve(f, u), p) <= p_norm(f, 1.0) * p_norm(u, p) * (1 + 1e-12), "Young in " + name);
            Complex lhs = inner_product(convolve(involute(f), u), v);
            Complex rhs = inner_product(u, convolve(f, v));
            double scale = std::max(1.0, std::abs(lhs));
            note(std::abs(lhs - rhs) <= 1e-10 * scale, "anti-isometry pairing in " + name);
            auto mom = cstar_radius_hermitian(f, 6);
            const auto& lc = mom.lower_certificate.values;
            for (std::size_t k = 1; k < lc.size(); ++k)
                note(lc[k] >= lc[k - 1] * (1 - 1e-12), "moment monotonicity in " + name);
            auto l1 = l1_spectral_radius(f, 3);
            const auto& uc = l1.upper_certificate.values;
            for (std::size_t k = 1; k < uc.size(); ++k)
                note(uc[k] <= uc[k - 1] * (1 + 1e-12), "certificate monotonicity in " + name);
            for (const auto* e : {&mom, &l1})
                for (double lo : e->lower_certificate.values)
                    for (double hi : e->upper_certificate.values)
                        note(lo <= hi * (1 + 1e-12), "bracket soundness in " + name);
        }
    }
    // Replay determinism: two runs of one config give identical documents.
    nlohmann::json cfg = {{"schema", kConfigSchema},
                          {"experiments",
                           {{{"id", "g"}, {"kind", "growth"}, {"group", "lamplighter.Z2wrZ"}, {"levels", 8}},
                            {{"id", "k"}, {"kind", "kesten"}, {"group", "free.F2"}, {"with_identity", false}},
                            {{"id", "j"}, {"kind", "jenkins"}, {"group", "bs.BS12"}, {"n_max", 6}}}}};
    auto rc = parse_config(cfg, ".");
    auto a = run_jobs(rc, {1, {}, {}});
    auto b = run_jobs(rc, {2, {}, {}});
    for (std::size_t i = 0; i < a.results.size(); ++i)
        note(report_document(a.results[i]).dump() == report_document(b.results[i]).dump(), "replay determinism");
    Outcome o;
    o.pass = violations == 0;
    o.summary = fmt("%.0f property checks", static_cast<double>(checked)) +
                fmt(", violations %.0f", static_cast<double>(violations)) +
                " (associativity, inverse law, Young, anti-isometry 1e-10, moment and certificate monotonicity, "
                "bracket soundness, replay determinism); full suites run under ctest";
    if (!first.empty())
        o.summary += "; first: " + first;
    return o;
}

}  // namespace

// Arguments select criteria by number; none runs all seven.
int main(int argc, char** argv) {
    std::vector<bool> on(8, argc == 1);
    for (int i = 1; i < argc; ++i) {
        int k = std::atoi(argv[i]);
        if (k >= 1 && k <= 7)
            on[static_cast<std::size_t>(k)] = true;
    }
    const std::vector<std::tuple<const char*, double, Outcome (*)()>> all = {
        {"Jenkins gap", 60, jenkins_gap},
        {"Kesten free-group value", 300, kesten_value},
        {"abelian Gelfand exactness", 120, abelian_exactness},
        {"growth rates", 180, growth_rates},
        {"inequality suites", 1200, inequality_grid},
        {"Pytlik equality", 600, pytlik_equality},
        {"property suites", 600, property_suites},
    };
    int ran = 0;
    for (std::size_t k = 1; k <= all.size(); ++k) {
        if (!on[k])
            continue;
        auto [title, limit, body] = all[k - 1];
        criterion(static_cast<int>(k), title, limit, body);
        ++ran;
    }
    std::printf("acceptance: %d of %d criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
