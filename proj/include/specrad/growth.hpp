#pragma once

#include <cstddef>
#include <vector>

#include "specrad/estimate.hpp"
#include "specrad/group.hpp"

namespace specrad {

/// Finite subset S of a catalog group, without duplicates.
class GeneratingSet {
public:
    /// Removes duplicates (first occurrence wins) and computes the flags.
    GeneratingSet(const Group& g, std::vector<GroupElement> elements);

    /// Default generators of `g` together with their inverses, optionally
    /// with the identity prepended.
    static GeneratingSet standard(const Group& g, bool with_identity = true);
    /// Parses each word with `Group::parse`.
    static GeneratingSet from_words(const Group& g, const std::vector<std::string>& words);

    const Group& group() const { return *group_; }
    const std::vector<GroupElement>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    bool symmetric() const { return symmetric_; }
    bool contains_identity() const { return contains_identity_; }
    bool contains(const GroupElement& x) const;

    GeneratingSet symmetrized() const;
    GeneratingSet with_identity() const;

private:
    const Group* group_;
    std::vector<GroupElement> elements_;
    bool symmetric_ = false;
    bool contains_identity_ = false;
};

struct GrowthOptions {
    std::size_t max_elements = 50'000'000;
    /// Return the completed prefix instead of throwing on budget exhaustion.
    bool allow_partial = false;
};

struct ProductSetSequence {
    GroupId group;
    bool contains_identity = false;
    /// sizes[n-1] = |S^n|.
    std::vector<std::size_t> sizes;
    /// Elements of S^N in deterministic insertion order.
    std::vector<GroupElement> frontier;
    /// False when the budget stopped the expansion before N.
    bool complete = true;
};

/// Exact cardinalities of S, S^2, ..., S^N. With e in S the n-th set is grown
/// from the newest shell only; otherwise every level is a full product.
/// Throws BudgetExceeded (with the last completed n) unless allow_partial.
ProductSetSequence product_set_sequence(const GeneratingSet& S, std::size_t N, const GrowthOptions& opt = {});

/// Bracket for nu_S = lim |S^n|^{1/n}. Upper certificate is |S^m|^{1/m} at
/// m = 1, 2, 4, ...; the point estimate is the last sphere-size ratio when
/// e is in S (plain ratio otherwise). Both ratio sequences are diagnostics.
SpectralEstimate growth_rate_estimate(const ProductSetSequence& seq);

/// True iff the 2 + 4 + ... + 2^depth positive words in s, t are pairwise
/// distinct.
bool verify_free_semigroup(const Group& g, const GroupElement& s, const GroupElement& t, std::size_t depth,
                           std::size_t max_elements = 50'000'000);

/// Elements of the finite subgroup generated by `gens`, identity first.
/// Throws BudgetExceeded when it has more than `max_elements` elements.
std::vector<GroupElement> generated_subgroup(const Group& g, const std::vector<GroupElement>& gens,
                                             std::size_t max_elements = 100'000);

}  // namespace specrad
