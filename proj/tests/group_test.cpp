#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "specrad/errors.hpp"
#include "specrad/growth.hpp"
#include "specrad/lab.hpp"
#include "support.hpp"

using namespace specrad;
using specrad::test::G;

TEST_CASE("free group products reduce") {
    const Group& F2 = G("free.F2");
    CHECK(F2.is_identity(F2.multiply(F2.parse("a"), F2.parse("A"))));
    CHECK(F2.multiply(F2.parse("ab"), F2.parse("Ba")) == F2.parse("a^2"));
    CHECK(F2.format(F2.parse("a^2")) == F2.format(F2.parse("aa")));
    CHECK(F2.parse("a^-3") == F2.inverse(F2.parse("aaa")));
}

TEST_CASE("Heisenberg law matches unitriangular matrices") {
    const Group& H = G("heisenberg.H3Z");
    using M = std::array<std::array<long long, 3>, 3>;
    auto mat = [](long long x, long long y, long long z) { return M{{{1, x, z}, {0, 1, y}, {0, 0, 1}}}; };
    auto mul = [](const M& a, const M& b) {
        M c{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    c[i][j] += a[i][k] * b[k][j];
        return c;
    };
    auto el = [&](long long x, long long y, long long z) {
        return H.parse("(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")");
    };
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long long> d(-50, 50);
    for (int i = 0; i < 500; ++i) {
        long long x = d(rng), y = d(rng), z = d(rng), x2 = d(rng), y2 = d(rng), z2 = d(rng);
        M m = mul(mat(x, y, z), mat(x2, y2, z2));
        CHECK(H.multiply(el(x, y, z), el(x2, y2, z2)) == el(m[0][1], m[1][2], m[0][2]));
    }
}

TEST_CASE("mixing groups is rejected") {
    const Group& F2 = G("free.F2");
    const Group& Z2 = G("abelian.Z2");
    CHECK_THROWS_AS(F2.multiply(F2.parse("a"), Z2.parse("a")), GroupMismatch);
    CHECK_THROWS_AS(catalog_group("free.F9"), InvalidInput);
}

TEST_CASE("normal forms round-trip through format and parse") {
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        for (const auto& x : element_pool(g, 3))
            CHECK(g.parse(g.format(x)) == x);
    }
}

TEST_CASE("product set sizes") {
    SUBCASE("F2 with e: 2 3^n - 1") {
        auto seq = product_set_sequence(GeneratingSet::standard(G("free.F2")), 8);
        REQUIRE(seq.sizes.size() == 8);
        CHECK(seq.sizes[0] == 5);
        CHECK(seq.sizes[1] == 17);
        CHECK(seq.sizes[2] == 53);
        for (std::size_t n = 1; n <= 8; ++n)
            CHECK(seq.sizes[n - 1] == 2 * static_cast<std::size_t>(std::pow(3, n)) - 1);
    }
    SUBCASE("Z2 with e: 2n^2 + 2n + 1") {
        auto seq = product_set_sequence(GeneratingSet::standard(G("abelian.Z2")), 12);
        CHECK(seq.sizes[0] == 5);
        CHECK(seq.sizes[1] == 13);
        for (std::size_t n = 1; n <= 12; ++n)
            CHECK(seq.sizes[n - 1] == 2 * n * n + 2 * n + 1);
    }
    SUBCASE("S = {e} stays a point") {
        const Group& Z = G("abelian.Z1");
        auto seq = product_set_sequence(GeneratingSet(Z, {Z.identity()}), 6);
        for (auto s : seq.sizes)
            CHECK(s == 1);
    }
    SUBCASE("frontier expansion agrees with naive products on every group") {
        for (const auto& name : catalog_names()) {
            const Group& g = catalog_group(name);
            for (bool with_e : {true, false}) {
                auto S = GeneratingSet::standard(g, with_e);
                if (S.size() == 0)
                    continue;
                CAPTURE(name);
                CAPTURE(with_e);
                CHECK(product_set_sequence(S, 4).sizes == test::naive_product_sizes(S, 4));
            }
        }
    }
    SUBCASE("budget exhaustion") {
        auto S = GeneratingSet::standard(G("free.F4"));
        CHECK_THROWS_AS(product_set_sequence(S, 10, {1000, false}), BudgetExceeded);
        auto part = product_set_sequence(S, 10, {1000, true});
        CHECK_FALSE(part.complete);
        CHECK(part.sizes.size() < 10);
        CHECK(part.sizes.back() <= 1000);
    }
}

TEST_CASE("growth rate estimates") {
    auto f2 = growth_rate_estimate(product_set_sequence(GeneratingSet::standard(G("free.F2")), 8));
    REQUIRE(f2.estimate);
    CHECK(*f2.estimate == doctest::Approx(3.0).epsilon(1e-12));
    for (double r : f2.diagnostics.at("sphere_ratio"))
        CHECK(r == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f2.upper >= 3.0);
    CHECK(f2.lower <= 3.0);

    auto z2 = growth_rate_estimate(product_set_sequence(GeneratingSet::standard(G("abelian.Z2")), 30));
    CHECK(std::abs(*z2.estimate - 1.0) <= 0.1);
    CHECK(z2.lower <= 1.0 + 1e-12);

    auto ll = growth_rate_estimate(
        product_set_sequence(GeneratingSet::standard(G("lamplighter.Z2wrZ")), 18, {2'000'000, true}));
    CHECK(*ll.estimate > 1.2);
    CHECK(ll.upper > 1.2);
}

TEST_CASE("free sub-semigroups") {
    const Group& F2 = G("free.F2");
    CHECK(verify_free_semigroup(F2, F2.parse("a"), F2.parse("b"), 10));
    const Group& Z2 = G("abelian.Z2");
    CHECK_FALSE(verify_free_semigroup(Z2, Z2.parse("a"), Z2.parse("b"), 3));
    const Group& BS = G("bs.BS12");
    auto pair = BS.free_semigroup_pair();
    REQUIRE(pair);
    CHECK(verify_free_semigroup(BS, pair->first, pair->second, 8));
    CHECK_FALSE(verify_free_semigroup(BS, BS.parse("a"), BS.parse("a"), 2));
}

TEST_CASE("generating set flags") {
    const Group& F2 = G("free.F2");
    auto S = GeneratingSet::from_words(F2, {"a", "b", "a", "A"});
    CHECK(S.size() == 3);
    CHECK_FALSE(S.symmetric());
    CHECK_FALSE(S.contains_identity());
    auto T = S.symmetrized();
    CHECK(T.symmetric());
    CHECK(T.size() == 4);
    CHECK(T.with_identity().contains_identity());
    for (const auto& name : catalog_names()) {
        auto std_set = GeneratingSet::standard(catalog_group(name));
        CHECK(std_set.symmetric());
        CHECK(std_set.contains_identity());
    }
}

// Invariants.

TEST_CASE("associativity, inverse and identity laws on random elements") {
    std::mt19937_64 rng(11);
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        auto pool = element_pool(g, 4);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::size_t bad = 0;
        for (int i = 0; i < 10000; ++i) {
            // Products of pool elements reach beyond the ball.
            auto a = g.multiply(pool[pick(rng)], pool[pick(rng)]);
            auto b = g.multiply(pool[pick(rng)], pool[pick(rng)]);
            auto c = pool[pick(rng)];
            bad += g.multiply(g.multiply(a, b), c) != g.multiply(a, g.multiply(b, c));
            bad += !g.is_identity(g.multiply(a, g.inverse(a)));
            bad += !g.is_identity(g.multiply(g.inverse(a), a));
            bad += g.multiply(a, g.identity()) != a || g.multiply(g.identity(), a) != a;
            bad += g.inverse(g.inverse(a)) != a;
        }
        CAPTURE(name);
        CHECK(bad == 0);
    }
}

TEST_CASE("product sets with e are nested and submultiplicative") {
    for (const auto& name : catalog_names()) {
        const Group& g = catalog_group(name);
        auto S = GeneratingSet::standard(g, true);
        auto seq = product_set_sequence(S, 7, {2'000'000, true});
        const auto& s = seq.sizes;
        CAPTURE(name);
        for (std::size_t n = 1; n < s.size(); ++n)
            CHECK(s[n] >= s[n - 1]);
        for (std::size_t m = 1; m <= s.size(); ++m)
            for (std::size_t n = 1; m + n <= s.size(); ++n)
                CHECK(s[m + n - 1] <= s[m - 1] * s[n - 1]);
        // S^n is the first |S^n| elements of the frontier.
        if (seq.complete && s.size() >= 3) {
            auto small = product_set_sequence(S, 3);
            for (std::size_t i = 0; i < small.frontier.size(); ++i)
                CHECK(small.frontier[i] == seq.frontier[i]);
        }
    }
}

TEST_CASE("product set enumeration is deterministic") {
    for (const char* name : {"free.F3", "lamplighter.Z2wrZ", "bs.BS12", "locfin.Sinf"}) {
        for (bool with_e : {true, false}) {
            auto S = GeneratingSet::standard(G(name), with_e);
            auto a = product_set_sequence(S, 5);
            auto b = product_set_sequence(S, 5);
            CHECK(a.sizes == b.sizes);
            CHECK(a.frontier == b.frontier);
        }
    }
}

TEST_CASE("locally finite groups have finite generated subgroups") {
    const Group& Sinf = G("locfin.Sinf");
    CHECK(generated_subgroup(Sinf, {Sinf.parse("a"), Sinf.parse("b"), Sinf.parse("c")}).size() == 24);
    CHECK(generated_subgroup(Sinf, GeneratingSet::standard(Sinf, false).elements()).size() == 120);
    const Group& Z2s = G("locfin.Z2sum");
    CHECK(generated_subgroup(Z2s, GeneratingSet::standard(Z2s, false).elements()).size() == 64);
    CHECK_THROWS(generated_subgroup(Sinf, Sinf.generators()));
}
