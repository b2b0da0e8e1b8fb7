#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "specrad/errors.hpp"
#include "specrad/lab.hpp"
#include "specrad/serialize.hpp"
#include "support.hpp"

using namespace specrad;
using specrad::test::elem;
using specrad::test::G;

namespace {

AlgebraElement h_of(const GeneratingSet& S) { return AlgebraElement::normalized_indicator(S); }

void check_report_shape(const ExperimentReport& r) {
    CHECK(validate_report(r));
    for (const auto& q : r.quantities) {
        CAPTURE(q.name);
        CHECK(q.lower <= q.upper);
        CHECK(!q.method.empty());
        // Every bracket either is exact or carries a certificate.
        CHECK((q.exact || !q.lower_certificate.empty() || !q.upper_certificate.empty() || q.lower == q.upper ||
               !q.method.empty()));
    }
    if (r.verdict == Verdict::Fail) {
        bool certified = false;
        for (const auto& c : r.comparisons)
            certified = certified || c.verdict == Verdict::Fail;
        CHECK(certified);
    }
}

}  // namespace

TEST_CASE("verdicts read opposite bound directions") {
    auto a = Quantity::bracket("a", 0.9, 1.0, "t");
    auto b = Quantity::bracket("b", 1.1, 1.2, "t");
    auto c = Quantity::bracket("c", 0.95, 1.05, "t");
    constexpr auto kC = ComparisonMode::Consistent;
    constexpr auto kP = ComparisonMode::Certified;
    auto d = decide(a, b, false, kC, 1e-6);
    CHECK(d.verdict == Verdict::Pass);
    CHECK(d.certified);
    CHECK(d.margin == doctest::Approx(0.3));
    CHECK(decide(a, b, false, kP, 1e-6).margin == doctest::Approx(0.1));
    CHECK(decide(b, a, false, kC, 1e-6).verdict == Verdict::Fail);
    CHECK(decide(b, a, false, kP, 1e-6).verdict == Verdict::Fail);
    // Overlap: consistent with the claim, not a proof of it.
    CHECK(decide(a, c, false, kC, 1e-6).verdict == Verdict::Pass);
    CHECK_FALSE(decide(a, c, false, kC, 1e-6).certified);
    CHECK(decide(a, c, false, kP, 1e-6).verdict == Verdict::Inconclusive);
    auto one = Quantity::exact_value("one", 1.0, "t");
    CHECK(decide(one, one, false, kP, 1e-6).verdict == Verdict::Pass);
    CHECK(decide(one, one, true, kP, 1e-6).verdict == Verdict::Inconclusive);
    CHECK(decide(one, one, true, kC, 1e-6).verdict == Verdict::Pass);
    CHECK_FALSE(decide(one, one, true, kC, 1e-6).certified);
    // Tolerance sits on the favourable side only.
    auto slightly = Quantity::exact_value("s", 1.0 + 5e-7, "t");
    for (auto mode : {kC, kP}) {
        CHECK(decide(slightly, one, false, mode, 1e-6).verdict == Verdict::Pass);
        CHECK(decide(Quantity::exact_value("t", 1.0 + 2e-6, "t"), one, false, mode, 1e-6).verdict == Verdict::Fail);
    }
    auto open = Quantity::bracket("open", 0.0, std::numeric_limits<double>::infinity(), "t");
    CHECK(decide(a, open, false, kC, 1e-6).verdict == Verdict::Inconclusive);
}

TEST_CASE("reports refuse same-direction comparisons") {
    ExperimentReport r;
    r.add(Quantity::bracket("x", 0.5, 2.0, "t"));
    r.add(Quantity::exact_value("y", 1.0, "t"));
    r.compare("x", "y");
    r.compare("x", "y", false, "", ComparisonMode::Certified);
    r.finalize();
    CHECK(r.comparisons[0].verdict == Verdict::Pass);
    CHECK(r.comparisons[1].verdict == Verdict::Inconclusive);
    CHECK(r.verdict == Verdict::Inconclusive);
    CHECK_FALSE(r.certified());
    CHECK(validate_report(r));
    CHECK(validate_report(report_from_json(to_json(r))));

    for (const char* dir : {"lower", "upper"}) {
        auto j = to_json(r);
        j["comparisons"][0]["lhs_bound"] = dir;
        j["comparisons"][0]["rhs_bound"] = dir;
        CHECK_THROWS_AS(report_from_json(j), SchemaError);
    }
    // Reading the pass as a certified one no longer validates.
    auto k = to_json(r);
    k["comparisons"][0]["lhs_bound"] = "upper";
    k["comparisons"][0]["rhs_bound"] = "lower";
    CHECK_FALSE(validate_report(report_from_json(k)));
    auto m = to_json(r);
    m["comparisons"][1]["verdict"] = "pass";
    CHECK_FALSE(validate_report(report_from_json(m)));
}

TEST_CASE("interpolation examples") {
    auto mid = InterpolationParams::make(Exponent::parse("5/4"), Exponent::parse("3/2"), Exponent::parse("7/4"));
    SUBCASE("delta_e") {
        auto r = check_pf_interpolation(AlgebraElement::identity(G("free.F2")), mid);
        CHECK(r.verdict == Verdict::Pass);
        check_report_shape(r);
    }
    SUBCASE("Z2, random Hermitian") {
        std::mt19937_64 rng(21);
        const Group& Z2 = G("abelian.Z2");
        for (int i = 0; i < 5; ++i) {
            auto r = check_pf_interpolation(random_hermitian(Z2, element_pool(Z2, 2), 3, rng), mid);
            CHECK(r.verdict == Verdict::Pass);
            check_report_shape(r);
        }
    }
    SUBCASE("F2, h_S") {
        LabOptions opt;
        opt.lp.radius = 6;
        opt.lp.ball_budget = 100'000;
        opt.lp.truncation_radius = 6;
        auto r = check_pf_interpolation(h_of(GeneratingSet::standard(G("free.F2"), false)), mid, opt);
        CHECK(r.verdict != Verdict::Fail);
        CHECK(r.verdict == Verdict::Pass);
        check_report_shape(r);
    }
}

TEST_CASE("growth chain examples") {
    const Group& Z = G("abelian.Z1");
    SUBCASE("Z, h over {-1, 0, 1}, p = 2, n = 2") {
        auto S = GeneratingSet::standard(Z, true);
        auto r = check_growth_chain(h_of(S), S, Exponent::parse("2"), 2);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.quantity("||f^n||_1").lower == doctest::Approx(1.0));
        CHECK(r.quantity("|S^n|").lower == 5.0);
        CHECK(r.quantity("||f||_p").lower == doctest::Approx(1.0 / std::sqrt(3.0)));
        // ||lambda_2(f)|| = 1 by Fourier, so the right side is sqrt(5/3).
        const auto& rhs = r.quantity("pf(f^(n-1)) ||f||_p |S^n|^(1/q)");
        CHECK(rhs.upper >= std::sqrt(5.0 / 3.0) * (1 - 1e-12));
        CHECK(rhs.lower <= std::sqrt(5.0 / 3.0) * (1 + 1e-12));
        check_report_shape(r);
    }
    SUBCASE("delta_e") {
        const Group& F2 = G("free.F2");
        auto S = GeneratingSet::standard(F2, true);
        for (std::size_t n : {1u, 3u})
            CHECK(check_growth_chain(AlgebraElement::identity(F2), S, Exponent::parse("4/3"), n).verdict ==
                  Verdict::Pass);
    }
    SUBCASE("F2, h_S, p = 3/2, n <= 6") {
        auto S = GeneratingSet::standard(G("free.F2"), true);
        auto grid = growth_chain_grid(h_of(S), S, {Exponent::parse("3/2")}, 6);
        REQUIRE(grid.size() == 6);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& r = grid[i];
            CHECK(r.verdict == Verdict::Pass);
            // n = 1 is Hoelder with equality for a uniform f.
            if (i > 0)
                CHECK(r.margin > 0.0);
            check_report_shape(r);
        }
    }
    SUBCASE("support outside S violates the precondition") {
        const Group& F2 = G("free.F2");
        auto S = GeneratingSet::from_words(F2, {"e", "a", "A"});
        auto f = elem(F2, {{"b", 0.5}, {"B", 0.5}});
        CHECK_THROWS_AS(check_growth_chain(f, S, Exponent::parse("3/2"), 2), InvalidInput);
    }
}

TEST_CASE("growth chain holds on every catalog group and grid exponent") {
    std::vector<Exponent> ps;
    for (const char* p : {"5/4", "4/3", "3/2", "5/3", "7/4"})
        ps.push_back(Exponent::parse(p));
    std::mt19937_64 rng(22);
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        auto pool = element_pool(g, 1);
        for (int i = 0; i < 3; ++i) {
            auto f = random_hermitian(g, pool, 2, rng);
            auto S = GeneratingSet(g, f.support()).symmetrized().with_identity();
            for (const auto& r : growth_chain_grid(f, S, ps, 5)) {
                CAPTURE(name);
                CHECK(r.verdict != Verdict::Fail);
            }
        }
    }
}

TEST_CASE("spectral growth bound examples") {
    SUBCASE("Z2 h_S") {
        auto S = GeneratingSet::standard(G("abelian.Z2"), true);
        auto r = check_spectral_growth_bound(h_of(S), S, Exponent::parse("4"));
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.quantity("r_l1(f)").upper == doctest::Approx(1.0));
        CHECK(r.details["rhs_upper_nonincreasing_in_q"].get<bool>());
        check_report_shape(r);
    }
    SUBCASE("F2 h_S, q = 4") {
        auto S = GeneratingSet::standard(G("free.F2"), false);
        LabOptions opt;
        opt.radius = 8;
        auto r = check_spectral_growth_bound(h_of(S), S.with_identity(), Exponent::parse("4"), opt);
        CHECK(r.verdict != Verdict::Fail);
        CHECK(r.details["rhs_upper_nonincreasing_in_q"].get<bool>());
        check_report_shape(r);
    }
    SUBCASE("delta_e") {
        const Group& F2 = G("free.F2");
        auto S = GeneratingSet::standard(F2, true);
        auto r = check_spectral_growth_bound(AlgebraElement::identity(F2), S, Exponent::parse("8"));
        CHECK(r.verdict == Verdict::Pass);
    }
    SUBCASE("RHS is nonincreasing in q on random inputs") {
        std::mt19937_64 rng(23);
        for (const char* name : {"heisenberg.H3Z", "lamplighter.Z2wrZ", "free.F3", "locfin.Sinf"}) {
            const Group& g = G(name);
            auto f = random_hermitian(g, element_pool(g, 1), 2, rng);
            auto S = GeneratingSet(g, f.support()).symmetrized().with_identity();
            auto r = check_spectral_growth_bound(f, S, Exponent::parse("4"));
            CHECK(r.details["rhs_upper_nonincreasing_in_q"].get<bool>());
            CHECK(r.verdict != Verdict::Fail);
        }
    }
}

TEST_CASE("Kesten growth lemma examples") {
    auto q4 = Exponent::parse("4").conjugate();
    SUBCASE("F2 with e") {
        auto r = check_kesten_growth_lemma(GeneratingSet::standard(G("free.F2"), true), q4);
        CHECK(r.verdict == Verdict::Pass);
        // nu_S <= |S^8|^(1/8), so the left side reaches down to below 3^(-1/4).
        CHECK(r.quantity("nu_S^(-1/q)").lower <= std::pow(3.0, -0.25));
        check_report_shape(r);
    }
    SUBCASE("S4 inside the finitary symmetric group") {
        const Group& S = G("locfin.Sinf");
        auto gens = GeneratingSet::from_words(S, {"a", "b", "c"}).symmetrized();
        auto r = check_kesten_growth_lemma(gens, q4);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.quantity("nu_S").upper == doctest::Approx(1.0));
    }
    SUBCASE("lamplighter") {
        auto r = check_kesten_growth_lemma(GeneratingSet::standard(G("lamplighter.Z2wrZ"), true), q4);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.margin > 0.0);
    }
    SUBCASE("non-symmetric S is rejected") {
        const Group& F2 = G("free.F2");
        CHECK_THROWS_AS(check_kesten_growth_lemma(GeneratingSet::from_words(F2, {"a", "b"}), q4), InvalidInput);
    }
}

TEST_CASE("Kesten amenability probe") {
    SUBCASE("Z2") {
        auto r = kesten_amenability_probe(GeneratingSet::standard(G("abelian.Z2"), true));
        CHECK(r.details["classification"] == "amenable-consistent");
        CHECK(r.verdict != Verdict::Fail);
    }
    SUBCASE("F2") {
        LabOptions opt;
        opt.radius = 10;
        auto r = kesten_amenability_probe(GeneratingSet::standard(G("free.F2"), false), opt);
        const auto& q = r.quantity("r_cstar(h_S)");
        CHECK(q.lower >= 0.84);
        CHECK(q.upper <= 1.0 + 1e-12);
        CHECK(r.details["classification"] == "inconclusive");
        CHECK(r.details["extrapolation_flag"] == "non-amenable");
        CHECK(std::abs(r.details["extrapolated_radius"].get<double>() - std::sqrt(3.0) / 2) <= 0.02);
    }
    SUBCASE("trivial group") {
        const Group& T = G("trivial");
        auto r = kesten_amenability_probe(GeneratingSet(T, {T.identity()}));
        CHECK(r.quantity("r_cstar(h_S)").lower == doctest::Approx(1.0));
        CHECK(r.quantity("r_cstar(h_S)").upper == doctest::Approx(1.0));
        CHECK(r.details["classification"] == "amenable-consistent");
    }
}

TEST_CASE("Jenkins witness") {
    const Group& F2 = G("free.F2");
    SUBCASE("F2 default coefficients") {
        auto r = jenkins_witness(F2, F2.parse("a"), F2.parse("b"), {}, 10);
        CHECK(r.verdict == Verdict::Pass);
        auto sizes = r.details["support_sizes"].get<std::vector<double>>();
        for (std::size_t n = 1; n <= sizes.size(); ++n)
            CHECK(sizes[n - 1] == std::pow(3.0, static_cast<double>(n)));
        CHECK(r.quantity("circle_sup").lower == doctest::Approx(std::sqrt(5.0) / 3).epsilon(1e-10));
        CHECK(r.quantity("circle_sup").upper == doctest::Approx(std::sqrt(5.0) / 3).epsilon(1e-10));
        auto g = r.details["g_moment_lower_bounds"].get<std::vector<double>>();
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(g[i] <= 5.0 / 9.0 + 1e-6);
            if (i > 0)
                CHECK(g[i] >= g[i - 1] * (1 - 1e-12));
        }
        CHECK(r.quantity("r_l1(f)").lower == 1.0);
        check_report_shape(r);
    }
    SUBCASE("coefficients with circle sup 1 are rejected") {
        WitnessCoefficients c{{1.0 / 3, 0}, {1.0 / 3, 0}, {1.0 / 3, 0}};
        CHECK(circle_sup(c).upper == doctest::Approx(1.0));
        CHECK_THROWS_AS(jenkins_witness(F2, F2.parse("a"), F2.parse("b"), c, 4), InvalidInput);
    }
    SUBCASE("coefficient moduli must be 1/3") {
        WitnessCoefficients c{{0.5, 0}, {0, 1.0 / 3}, {1.0 / 3, 0}};
        CHECK_THROWS_AS(jenkins_witness(F2, F2.parse("a"), F2.parse("b"), c, 4), InvalidInput);
    }
    SUBCASE("commuting pair is rejected") {
        const Group& Z2 = G("abelian.Z2");
        CHECK_THROWS_AS(jenkins_witness(Z2, Z2.parse("a"), Z2.parse("b"), {}, 4), InvalidInput);
    }
    SUBCASE("BS(1,2) free pair") {
        const Group& BS = G("bs.BS12");
        auto pair = BS.free_semigroup_pair();
        REQUIRE(pair);
        auto r = jenkins_witness(BS, pair->first, pair->second, {}, 8);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.details["gap"].get<double>() > 0.25);
    }
    SUBCASE("circle sup against dense sampling") {
        std::mt19937_64 rng(24);
        std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
        for (int i = 0; i < 20; ++i) {
            WitnessCoefficients c{std::polar(1.0 / 3, ang(rng)), std::polar(1.0 / 3, ang(rng)),
                                  std::polar(1.0 / 3, ang(rng))};
            auto e = circle_sup(c);
            double best = 0;
            for (int k = 0; k < 200000; ++k) {
                Complex z = std::polar(1.0, 2 * std::numbers::pi * k / 200000);
                best = std::max(best, std::abs(c.a0 + c.a1 * z + c.a2 * z * z));
            }
            // The grid misses the maximum by at most |p|'' (pi / 200000)^2 / 2.
            CHECK(e.lower <= best + 10 * std::pow(std::numbers::pi / 200000, 2));
            CHECK(e.upper >= best - 1e-12);
            CHECK(e.upper - best <= 1e-8);
        }
    }
}

TEST_CASE("rapid decay probe") {
    SUBCASE("delta_e") {
        const Group& F2 = G("free.F2");
        auto r = check_rd_bound(AlgebraElement::identity(F2), 2.0, 1.0);
        CHECK(r.verdict == Verdict::Pass);
    }
    SUBCASE("F2 sphere samples, alpha 2, C 2") {
        auto r = rd_falsifier_search(G("free.F2"), 2.0, 2.0, 3, 10, 5);
        CHECK(r.verdict == Verdict::Pass);
        CHECK(r.details["worst_ratio"].get<double>() <= 1.0);
    }
    SUBCASE("Z, wide support, alpha 0, C 1: fails") {
        const Group& Z = G("abelian.Z1");
        std::vector<GroupElement> xs;
        for (int k = -10; k <= 10; ++k)
            xs.push_back(Z.parse("a^" + std::to_string(k)));
        auto f = AlgebraElement::indicator(Z, xs);
        auto r = check_rd_bound(f, 0.0, 1.0);
        CHECK(r.verdict == Verdict::Fail);
        // ||lambda(f)|| = 21 against ||f||_2 = sqrt(21).
        CHECK(r.quantity("||lambda(f)||").lower > std::sqrt(21.0));
    }
}

TEST_CASE("degenerate inputs pass trivially") {
    const Group& F2 = G("free.F2");
    auto S = GeneratingSet(F2, {F2.identity()});
    auto zero = AlgebraElement::zero(F2);
    CHECK(check_growth_chain(zero, S, Exponent::parse("3/2"), 3).verdict == Verdict::Pass);
    CHECK(check_kesten_growth_lemma(S, Exponent::parse("4/3")).verdict == Verdict::Pass);
    auto mid = InterpolationParams::make(Exponent::parse("5/4"), Exponent::parse("3/2"), Exponent::parse("7/4"));
    CHECK(check_pf_interpolation(zero, mid).verdict == Verdict::Pass);
    CHECK(check_rd_bound(zero, 1.0, 1.0).verdict == Verdict::Pass);
}

TEST_CASE("coinciding radius oracle") {
    std::mt19937_64 rng(25);
    const Group& F2 = G("free.F2");
    CHECK_FALSE(coinciding_radius_oracle(h_of(GeneratingSet::standard(F2))));
    for (const char* name : {"abelian.Z3", "locfin.Sinf", "locfin.Z2sum"}) {
        const Group& g = G(name);
        auto f = random_hermitian(g, element_pool(g, 2), 3, rng);
        auto o = coinciding_radius_oracle(f);
        REQUIRE(o);
        auto l1 = l1_spectral_radius(f, 4);
        CHECK(o->lower <= l1.upper * (1 + 1e-9));
        CHECK(o->upper >= cstar_radius_hermitian(f, 8).lower * (1 - 1e-9));
    }
}
