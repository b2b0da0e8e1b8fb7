#include "specrad/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <absl/container/flat_hash_set.h>

#include "specrad/errors.hpp"

namespace specrad {

using ElementSet = absl::flat_hash_set<GroupElement, ElementHash>;

GeneratingSet::GeneratingSet(const Group& g, std::vector<GroupElement> elements) : group_(&g) {
    ElementSet seen;
    for (auto& x : elements) {
        g.check(x);
        if (seen.insert(x).second)
            elements_.push_back(std::move(x));
    }
    contains_identity_ = seen.contains(g.identity());
    symmetric_ = true;
    for (const auto& x : elements_)
        if (!seen.contains(g.inverse(x))) {
            symmetric_ = false;
            break;
        }
}

GeneratingSet GeneratingSet::standard(const Group& g, bool with_identity) {
    std::vector<GroupElement> v;
    if (with_identity)
        v.push_back(g.identity());
    for (std::size_t i = 0; i < g.default_generator_count(); ++i) {
        v.push_back(g.generators()[i]);
        v.push_back(g.inverse(g.generators()[i]));
    }
    return GeneratingSet(g, std::move(v));
}

GeneratingSet GeneratingSet::from_words(const Group& g, const std::vector<std::string>& words) {
    std::vector<GroupElement> v;
    v.reserve(words.size());
    for (const auto& w : words)
        v.push_back(g.parse(w));
    return GeneratingSet(g, std::move(v));
}

bool GeneratingSet::contains(const GroupElement& x) const {
    return std::find(elements_.begin(), elements_.end(), x) != elements_.end();
}

GeneratingSet GeneratingSet::symmetrized() const {
    auto v = elements_;
    for (const auto& x : elements_)
        v.push_back(group_->inverse(x));
    return GeneratingSet(*group_, std::move(v));
}

GeneratingSet GeneratingSet::with_identity() const {
    std::vector<GroupElement> v{group_->identity()};
    v.insert(v.end(), elements_.begin(), elements_.end());
    return GeneratingSet(*group_, std::move(v));
}

ProductSetSequence product_set_sequence(const GeneratingSet& S, std::size_t N, const GrowthOptions& opt) {
    if (N < 1)
        throw InvalidInput("product_set_sequence needs N >= 1");
    const Group& g = S.group();
    const auto& gens = S.elements();

    ProductSetSequence seq;
    seq.group = g.id();
    seq.contains_identity = S.contains_identity();

    auto over_budget = [&](std::size_t count, std::size_t completed) {
        if (count <= opt.max_elements)
            return false;
        if (!opt.allow_partial)
            throw BudgetExceeded("product set S^" + std::to_string(completed + 1) + " exceeds " +
                                     std::to_string(opt.max_elements) + " elements",
                                 completed);
        seq.complete = false;
        return true;
    };

    if (gens.empty()) {
        seq.sizes.assign(N, 0);
        return seq;
    }

    if (S.contains_identity()) {
        ElementSet seen(gens.begin(), gens.end());
        std::vector<GroupElement> all(gens.begin(), gens.end());
        std::size_t shell_begin = 0;
        seq.sizes.push_back(all.size());
        for (std::size_t n = 2; n <= N; ++n) {
            std::size_t shell_end = all.size();
            for (const auto& s : gens) {
                for (std::size_t i = shell_begin; i < shell_end; ++i) {
                    auto y = g.multiply(all[i], s);
                    if (seen.insert(y).second) {
                        all.push_back(std::move(y));
                        if (all.size() > opt.max_elements && over_budget(all.size(), n - 1)) {
                            all.resize(shell_end);
                            seq.frontier = std::move(all);
                            return seq;
                        }
                    }
                }
            }
            shell_begin = shell_end;
            seq.sizes.push_back(all.size());
        }
        seq.frontier = std::move(all);
        return seq;
    }

    std::vector<GroupElement> level(gens.begin(), gens.end());
    seq.sizes.push_back(level.size());
    for (std::size_t n = 2; n <= N; ++n) {
        ElementSet seen;
        std::vector<GroupElement> next;
        bool aborted = false;
        for (const auto& s : gens) {
            for (const auto& x : level) {
                auto y = g.multiply(x, s);
                if (seen.insert(y).second) {
                    next.push_back(std::move(y));
                    if (next.size() > opt.max_elements && over_budget(next.size(), n - 1)) {
                        aborted = true;
                        break;
                    }
                }
            }
            if (aborted)
                break;
        }
        if (aborted)
            break;
        level = std::move(next);
        seq.sizes.push_back(level.size());
    }
    seq.frontier = std::move(level);
    return seq;
}

SpectralEstimate growth_rate_estimate(const ProductSetSequence& seq) {
    if (seq.sizes.size() < 2)
        throw InvalidInput("growth_rate_estimate needs at least two product-set sizes");
    SpectralEstimate e;
    e.target = Target::GrowthRate;
    e.method = "product-set submultiplicativity";
    e.complete = seq.complete;
    e.lower_certificate.label = "nu_S >= 1";
    e.upper_certificate.label = "|S^m|^(1/m), m = 2^k";

    const auto& sz = seq.sizes;
    if (sz.front() == 0) {
        e.lower = e.upper = 0.0;
        e.lower_certificate.push(1, 0.0);
        e.upper_certificate.push(1, 0.0);
        return e;
    }

    e.lower_certificate.push(1, 1.0);
    e.lower = 1.0;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= sz.size(); m *= 2) {
        double v = std::pow(static_cast<double>(sz[m - 1]), 1.0 / static_cast<double>(m));
        e.upper_certificate.push(static_cast<double>(m), v);
        best = std::min(best, v);
    }
    // |S^(n+1)| = |S^n| forces S^(n+1) = s S^n = S^n s for every s in S, hence
    // S^(n+2) is contained in S^(n+1) s and the sizes stay constant: nu_S = 1.
    for (std::size_t n = 1; n < sz.size(); ++n) {
        if (sz[n] == sz[n - 1]) {
            e.upper_certificate.label += "; stabilised product set";
            e.upper_certificate.push(static_cast<double>(n + 1), 1.0);
            best = 1.0;
            break;
        }
    }
    e.upper = best;

    std::vector<double> ratio, sphere_ratio;
    for (std::size_t n = 1; n < sz.size(); ++n) {
        ratio.push_back(static_cast<double>(sz[n]) / static_cast<double>(sz[n - 1]));
        if (n >= 2 && sz[n - 1] > sz[n - 2] && sz[n] >= sz[n - 1])
            sphere_ratio.push_back(static_cast<double>(sz[n] - sz[n - 1]) /
                                   static_cast<double>(sz[n - 1] - sz[n - 2]));
    }
    e.diagnostics["size_ratio"] = ratio;
    e.diagnostics["sphere_ratio"] = sphere_ratio;
    std::vector<double> sizes(sz.begin(), sz.end());
    e.diagnostics["sizes"] = sizes;

    bool stabilised = seq.contains_identity && sz.back() == sz[sz.size() - 2];
    if (stabilised) {
        e.estimate = 1.0;
        e.estimate_label = "finite subgroup";
    } else if (seq.contains_identity && !sphere_ratio.empty() && sz.size() >= 3) {
        e.estimate = sphere_ratio.back();
        e.estimate_label = "(|S^(n+1)|-|S^n|)/(|S^n|-|S^(n-1)|)";
    } else {
        e.estimate = ratio.back();
        e.estimate_label = "|S^(n+1)|/|S^n|";
    }
    round_outward(e);
    e.lower = std::max(e.lower, 1.0);
    return e;
}

bool verify_free_semigroup(const Group& g, const GroupElement& s, const GroupElement& t, std::size_t depth,
                           std::size_t max_elements) {
    g.check(s);
    g.check(t);
    ElementSet seen;
    std::vector<GroupElement> level{g.identity()};
    for (std::size_t d = 1; d <= depth; ++d) {
        std::vector<GroupElement> next;
        next.reserve(level.size() * 2);
        for (const auto& x : level) {
            for (const auto* y : {&s, &t}) {
                auto z = g.multiply(x, *y);
                if (!seen.insert(z).second)
                    return false;
                next.push_back(std::move(z));
            }
        }
        if (seen.size() > max_elements)
            throw BudgetExceeded("free semigroup check exceeds the element budget", d);
        level = std::move(next);
    }
    return true;
}

std::vector<GroupElement> generated_subgroup(const Group& g, const std::vector<GroupElement>& gens,
                                             std::size_t max_elements) {
    std::vector<GroupElement> steps;
    for (const auto& x : gens) {
        steps.push_back(x);
        steps.push_back(g.inverse(x));
    }
    std::vector<GroupElement> all{g.identity()};
    ElementSet seen{g.identity()};
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (const auto& s : steps) {
            auto y = g.multiply(all[i], s);
            if (seen.insert(y).second) {
                all.push_back(std::move(y));
                if (all.size() > max_elements)
                    throw BudgetExceeded("generated subgroup exceeds " + std::to_string(max_elements) + " elements",
                                         0);
            }
        }
    }
    return all;
}

}  // namespace specrad
