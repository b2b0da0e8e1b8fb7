#pragma once

#include <random>
#include <vector>

#include "specrad/algebra.hpp"
#include "specrad/group.hpp"
#include "specrad/growth.hpp"
#include "specrad/lab.hpp"

namespace specrad::test {

inline const Group& G(const char* name) { return catalog_group(name); }

inline AlgebraElement elem(const Group& g, std::vector<std::pair<const char*, Complex>> terms) {
    std::vector<AlgebraElement::Term> t;
    for (auto& [w, c] : terms)
        t.emplace_back(g.parse(w), c);
    return AlgebraElement(g, std::move(t));
}

/// Random element with complex coefficients (not Hermitian).
inline AlgebraElement random_element(const Group& g, const std::vector<GroupElement>& pool, std::size_t terms,
                                     std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::vector<AlgebraElement::Term> t;
    for (std::size_t i = 0; i < terms; ++i)
        t.emplace_back(pool[pick(rng)], Complex(c(rng), c(rng)));
    return AlgebraElement(g, std::move(t));
}

/// Product sets by plain nested loops, S^n = S^(n-1) S.
inline std::vector<std::size_t> naive_product_sizes(const GeneratingSet& S, std::size_t N) {
    const Group& g = S.group();
    std::vector<GroupElement> cur = S.elements();
    std::vector<std::size_t> sizes{cur.size()};
    for (std::size_t n = 2; n <= N; ++n) {
        std::vector<GroupElement> next;
        for (const auto& x : cur)
            for (const auto& s : S.elements())
                next.push_back(g.multiply(x, s));
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur = std::move(next);
        sizes.push_back(cur.size());
    }
    return sizes;
}

}  // namespace specrad::test
