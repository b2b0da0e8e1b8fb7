#include "specrad/group.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <absl/container/flat_hash_set.h>

#include "specrad/errors.hpp"

namespace specrad {

std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
    if (auto c = a.group <=> b.group; c != 0)
        return c;
    if (auto c = a.word.size() <=> b.word.size(); c != 0)
        return c;
    for (std::size_t i = 0; i < a.word.size(); ++i) {
        if (auto c = a.word[i] <=> b.word[i]; c != 0)
            return c;
    }
    return std::strong_ordering::equal;
}

std::size_t ElementHash::operator()(const GroupElement& g) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ g.word.size();
    for (std::int64_t v : g.word) {
        std::uint64_t z = static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        h ^= z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
}

Group::Group(GroupId id, std::string name, std::string letters)
    : id_(id), name_(std::move(name)), letters_(std::move(letters)) {}

GroupElement Group::identity() const { return make({}); }

void Group::check(const GroupElement& a) const {
    if (a.group != id_)
        throw GroupMismatch("element does not belong to group " + name_);
}

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
    check(a);
    check(b);
    return make(multiply_payload(a.word, b.word));
}

GroupElement Group::inverse(const GroupElement& a) const {
    check(a);
    return make(inverse_payload(a.word));
}

std::optional<Payload> Group::parse_normal_form(std::string_view) const { return std::nullopt; }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

}  // namespace

GroupElement Group::parse(std::string_view text) const {
    text = trim(text);
    if (text.empty() || text == "e" || text == "1")
        return identity();
    if (text.front() == '(' || text.front() == '[' || text.front() == '{') {
        auto p = parse_normal_form(text);
        if (!p)
            throw InvalidInput("cannot parse '" + std::string(text) + "' as an element of " + name_);
        return make(std::move(*p));
    }

    GroupElement acc = identity();
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.') {
            ++i;
            continue;
        }
        auto pos = letters_.find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (!std::isalpha(static_cast<unsigned char>(c)) || pos == std::string::npos)
            throw InvalidInput("unknown generator '" + std::string(1, c) + "' for group " + name_);
        bool inverted = std::isupper(static_cast<unsigned char>(c)) != 0;
        ++i;
        long long exponent = 1;
        if (i < text.size() && text[i] == '^') {
            ++i;
            auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), exponent);
            if (ec != std::errc())
                throw InvalidInput("bad exponent in '" + std::string(text) + "'");
            i = static_cast<std::size_t>(ptr - text.data());
        }
        GroupElement g = generators_.at(pos);
        if (inverted)
            exponent = -exponent;
        if (exponent < 0) {
            g = inverse(g);
            exponent = -exponent;
        }
        for (long long k = 0; k < exponent; ++k)
            acc = multiply(acc, g);
    }
    return acc;
}

std::int64_t Group::word_length(const GroupElement& a, std::size_t max_elements) const {
    check(a);
    if (is_identity(a))
        return 0;
    std::vector<GroupElement> steps;
    for (std::size_t i = 0; i < default_generator_count(); ++i) {
        const auto& g = generators_[i];
        steps.push_back(g);
        auto gi = inverse(g);
        if (gi != g)
            steps.push_back(gi);
    }
    absl::flat_hash_set<GroupElement, ElementHash> seen{identity()};
    std::vector<GroupElement> shell{identity()};
    for (std::int64_t radius = 1; !shell.empty(); ++radius) {
        std::vector<GroupElement> next;
        for (const auto& x : shell) {
            for (const auto& s : steps) {
                auto y = multiply(x, s);
                if (y == a)
                    return radius;
                if (seen.insert(y).second)
                    next.push_back(std::move(y));
            }
        }
        if (seen.size() > max_elements)
            throw BudgetExceeded("word length search exceeded the element budget in " + name_,
                                 static_cast<std::size_t>(radius));
        shell = std::move(next);
    }
    throw InvalidInput("element is not in the subgroup generated by the default generators");
}

}  // namespace specrad
