#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace specrad {

enum class GroupKind : std::uint8_t {
    Free,             // F_k, k <= 4
    Abelian,          // Z^d, d <= 4 (d = 0 is the trivial group)
    Heisenberg,       // H_3(Z)
    Lamplighter,      // Z_2 wr Z
    BaumslagSolitar,  // BS(1,2)
    SymmetricTower,   // finitary permutations of N, union of S_n
    BooleanSum,       // direct sum of countably many Z_2
};

/// Compact identifier of a catalog group: kind plus rank parameter.
struct GroupId {
    GroupKind kind = GroupKind::Abelian;
    std::uint8_t rank = 0;

    friend constexpr auto operator<=>(const GroupId&, const GroupId&) = default;
};

/// Canonical normal-form payload. The encoding is group specific; two
/// elements of one group are equal iff their payloads are identical.
using Payload = boost::container::small_vector<std::int64_t, 4>;

struct GroupElement {
    GroupId group;
    Payload word;

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.group == b.group && a.word == b.word;
    }
    /// Deterministic total order: group, payload length, then payload
    /// entries. This is the iteration order of algebra supports.
    friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b);
};

struct ElementHash {
    std::size_t operator()(const GroupElement& g) const noexcept;
};

/// A finitely generated (or locally finite) discrete group from the fixed
/// catalog. Instances are immutable singletons obtained from `catalog_group`.
class Group {
public:
    virtual ~Group() = default;

    GroupId id() const noexcept { return id_; }
    /// Stable catalog identifier such as "free.F2".
    const std::string& name() const noexcept { return name_; }
    virtual std::string description() const = 0;

    virtual GroupElement identity() const;
    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& a) const;
    bool is_identity(const GroupElement& a) const { return a == identity(); }

    /// Normal-form string; `parse(format(x)) == x`.
    virtual std::string format(const GroupElement& a) const = 0;
    /// Accepts the normal-form syntax, "e", or a word in the generator
    /// letters (upper case = inverse, optional integer exponent "a^-3").
    GroupElement parse(std::string_view text) const;

    /// Named generators, one per letter, without inverses.
    const std::vector<GroupElement>& generators() const noexcept { return generators_; }
    const std::string& generator_letters() const noexcept { return letters_; }

    /// Number of leading generators forming the default generating set.
    /// Locally finite groups are not finitely generated; they use a prefix.
    virtual std::size_t default_generator_count() const { return generators_.size(); }

    /// Two elements generating a free sub-semigroup, when the group has a
    /// standard such pair.
    virtual std::optional<std::pair<GroupElement, GroupElement>> free_semigroup_pair() const {
        return std::nullopt;
    }

    virtual bool is_abelian() const { return false; }
    /// True when every finitely generated subgroup is finite.
    virtual bool is_locally_finite() const { return false; }

    /// Word length with respect to the default generating set (generators
    /// and their inverses). Groups with a closed form override this; the
    /// default runs a breadth-first search bounded by `max_elements`.
    virtual std::int64_t word_length(const GroupElement& a, std::size_t max_elements = 10'000'000) const;

    /// Throws GroupMismatch unless `a` belongs to this group.
    void check(const GroupElement& a) const;

protected:
    Group(GroupId id, std::string name, std::string letters);

    void set_generators(std::vector<GroupElement> gens) { generators_ = std::move(gens); }
    GroupElement make(Payload p) const { return GroupElement{id_, std::move(p)}; }

    virtual Payload multiply_payload(const Payload& a, const Payload& b) const = 0;
    virtual Payload inverse_payload(const Payload& a) const = 0;
    /// Parses the bracketed normal-form syntax; text is never "e" or a word.
    virtual std::optional<Payload> parse_normal_form(std::string_view text) const;

private:
    GroupId id_;
    std::string name_;
    std::string letters_;
    std::vector<GroupElement> generators_;
};

/// Looks up a catalog group by identifier; throws InvalidInput when unknown.
const Group& catalog_group(std::string_view name);
const Group& catalog_group(GroupId id);
/// All catalog identifiers in a stable order.
std::vector<std::string> catalog_names();

}  // namespace specrad
