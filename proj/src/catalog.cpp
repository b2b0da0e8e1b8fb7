#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "specrad/errors.hpp"
#include "specrad/group.hpp"

namespace specrad {
namespace {

// Parses "<open>v1,v2,...<close>" into integers; whitespace is ignored.
std::optional<std::vector<std::int64_t>> parse_int_list(std::string_view text, char open, char close) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(c);
    if (s.size() < 2 || s.front() != open || s.back() != close)
        return std::nullopt;
    std::vector<std::int64_t> out;
    std::string_view body(s.data() + 1, s.size() - 2);
    if (body.empty())
        return out;
    while (true) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc())
            return std::nullopt;
        out.push_back(v);
        body.remove_prefix(static_cast<std::size_t>(ptr - body.data()));
        if (body.empty())
            break;
        if (body.front() != ',')
            return std::nullopt;
        body.remove_prefix(1);
    }
    return out;
}

std::string join_ints(const std::vector<std::int64_t>& v, char open, char close) {
    std::string s(1, open);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(v[i]);
    }
    s += close;
    return s;
}

// ---------------------------------------------------------------------------
// Free groups. Reduced words are packed four bits per letter, sixteen letters
// per payload entry, first letter in the most significant nibble. Letter i
// has code 2i+1 and its inverse 2i+2; code 0 terminates the word.

using Letters = boost::container::small_vector<std::uint8_t, 64>;

class FreeGroup final : public Group {
public:
    explicit FreeGroup(int rank)
        : Group({GroupKind::Free, static_cast<std::uint8_t>(rank)}, "free.F" + std::to_string(rank),
                std::string("abcd").substr(0, static_cast<std::size_t>(rank))) {
        std::vector<GroupElement> gens;
        for (int i = 0; i < rank; ++i)
            gens.push_back(make(encode(Letters{static_cast<std::uint8_t>(2 * i + 1)})));
        set_generators(std::move(gens));
    }

    std::string description() const override {
        return "free group of rank " + std::to_string(id().rank) + " (reduced words)";
    }

    std::string format(const GroupElement& a) const override {
        check(a);
        auto w = decode(a.word);
        if (w.empty())
            return "e";
        std::string s;
        for (auto c : w) {
            char base = static_cast<char>('a' + (c - 1) / 2);
            s += (c % 2 == 1) ? base : static_cast<char>(std::toupper(base));
        }
        return s;
    }

    std::int64_t word_length(const GroupElement& a, std::size_t) const override {
        check(a);
        return static_cast<std::int64_t>(decode(a.word).size());
    }

    std::optional<std::pair<GroupElement, GroupElement>> free_semigroup_pair() const override {
        if (id().rank < 2)
            return std::nullopt;
        return std::pair{generators()[0], generators()[1]};
    }

protected:
    Payload multiply_payload(const Payload& a, const Payload& b) const override {
        Letters x = decode(a);
        Letters y = decode(b);
        std::size_t j = 0;
        while (!x.empty() && j < y.size() && x.back() == invert(y[j])) {
            x.pop_back();
            ++j;
        }
        x.insert(x.end(), y.begin() + static_cast<std::ptrdiff_t>(j), y.end());
        return encode(x);
    }

    Payload inverse_payload(const Payload& a) const override {
        Letters x = decode(a);
        std::reverse(x.begin(), x.end());
        for (auto& c : x)
            c = invert(c);
        return encode(x);
    }

private:
    static std::uint8_t invert(std::uint8_t c) { return (c % 2 == 1) ? c + 1 : c - 1; }

    static Letters decode(const Payload& p) {
        Letters out;
        for (std::int64_t chunk : p) {
            auto u = static_cast<std::uint64_t>(chunk);
            for (int k = 15; k >= 0; --k) {
                auto c = static_cast<std::uint8_t>((u >> (4 * k)) & 0xF);
                if (c == 0)
                    return out;
                out.push_back(c);
            }
        }
        return out;
    }

    static Payload encode(const Letters& w) {
        Payload p;
        for (std::size_t i = 0; i < w.size(); i += 16) {
            std::uint64_t u = 0;
            for (std::size_t k = 0; k < 16 && i + k < w.size(); ++k)
                u |= static_cast<std::uint64_t>(w[i + k]) << (4 * (15 - k));
            p.push_back(static_cast<std::int64_t>(u));
        }
        return p;
    }
};

// ---------------------------------------------------------------------------
// Z^d as integer tuples.

class AbelianLattice final : public Group {
public:
    explicit AbelianLattice(int dim)
        : Group({GroupKind::Abelian, static_cast<std::uint8_t>(dim)},
                dim == 0 ? std::string("trivial") : "abelian.Z" + std::to_string(dim),
                std::string("abcd").substr(0, static_cast<std::size_t>(dim))) {
        std::vector<GroupElement> gens;
        for (int i = 0; i < dim; ++i) {
            Payload p(static_cast<std::size_t>(dim), 0);
            p[static_cast<std::size_t>(i)] = 1;
            gens.push_back(make(std::move(p)));
        }
        set_generators(std::move(gens));
    }

    std::string description() const override {
        return id().rank == 0 ? "trivial group" : "free abelian group Z^" + std::to_string(id().rank);
    }

    GroupElement identity() const override { return make(Payload(id().rank, 0)); }

    std::string format(const GroupElement& a) const override {
        check(a);
        return join_ints({a.word.begin(), a.word.end()}, '(', ')');
    }

    std::int64_t word_length(const GroupElement& a, std::size_t) const override {
        check(a);
        std::int64_t n = 0;
        for (auto v : a.word)
            n += v < 0 ? -v : v;
        return n;
    }

    bool is_abelian() const override { return true; }
    bool is_locally_finite() const override { return id().rank == 0; }

protected:
    Payload multiply_payload(const Payload& a, const Payload& b) const override {
        Payload c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            c[i] = a[i] + b[i];
        return c;
    }
    Payload inverse_payload(const Payload& a) const override {
        Payload c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            c[i] = -a[i];
        return c;
    }
    std::optional<Payload> parse_normal_form(std::string_view text) const override {
        auto v = parse_int_list(text, '(', ')');
        if (!v || v->size() != id().rank)
            return std::nullopt;
        return Payload(v->begin(), v->end());
    }
};

// ---------------------------------------------------------------------------
// Heisenberg group: (x, y, z) is the unitriangular matrix [[1,x,z],[0,1,y],[0,0,1]].

class Heisenberg final : public Group {
public:
    Heisenberg() : Group({GroupKind::Heisenberg, 3}, "heisenberg.H3Z", "xy") {
        set_generators({make({1, 0, 0}), make({0, 1, 0})});
    }

    std::string description() const override { return "integer Heisenberg group H3(Z)"; }
    GroupElement identity() const override { return make({0, 0, 0}); }

    std::string format(const GroupElement& a) const override {
        check(a);
        return join_ints({a.word.begin(), a.word.end()}, '(', ')');
    }

protected:
    Payload multiply_payload(const Payload& a, const Payload& b) const override {
        return {a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
    }
    Payload inverse_payload(const Payload& a) const override {
        return {-a[0], -a[1], -a[2] + a[0] * a[1]};
    }
    std::optional<Payload> parse_normal_form(std::string_view text) const override {
        auto v = parse_int_list(text, '(', ')');
        if (!v || v->size() != 3)
            return std::nullopt;
        return Payload(v->begin(), v->end());
    }
};

// ---------------------------------------------------------------------------
// Lamplighter Z_2 wr Z. An element is (lamp configuration, cursor position);
// (f, m)(g, n) = (f + shift_m g, m + n). Payload is [pos] for an unlit
// configuration, otherwise [pos, base, mask0, mask1, ...] where lamp base+i is
// lit iff bit i of the masks is set; bit 0 of mask0 is always set and trailing
// zero masks are trimmed.

class Lamplighter final : public Group {
public:
    Lamplighter() : Group({GroupKind::Lamplighter, 1}, "lamplighter.Z2wrZ", "ta") {
        set_generators({make({1}), make({0, 0, 1})});
    }

    std::string description() const override { return "lamplighter group Z2 wr Z (t = shift, a = toggle)"; }
    GroupElement identity() const override { return make({0}); }

    std::string format(const GroupElement& a) const override {
        check(a);
        auto lamps = decode(a.word);
        std::string s = join_ints(lamps, '{', '}');
        return s + "@" + std::to_string(a.word[0]);
    }

    std::optional<std::pair<GroupElement, GroupElement>> free_semigroup_pair() const override {
        const auto& t = generators()[0];
        const auto& toggle = generators()[1];
        return std::pair{t, multiply(toggle, t)};
    }

protected:
    Payload multiply_payload(const Payload& a, const Payload& b) const override {
        auto fa = decode(a);
        auto fb = decode(b);
        for (auto& x : fb)
            x += a[0];
        std::vector<std::int64_t> sum;
        std::set_symmetric_difference(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(sum));
        return encode(a[0] + b[0], sum);
    }
    Payload inverse_payload(const Payload& a) const override {
        auto f = decode(a);
        for (auto& x : f)
            x -= a[0];
        return encode(-a[0], f);
    }
    std::optional<Payload> parse_normal_form(std::string_view text) const override {
        auto at = text.find('@');
        if (at == std::string_view::npos)
            return std::nullopt;
        auto lamps = parse_int_list(text.substr(0, at), '{', '}');
        auto pos = parse_int_list("(" + std::string(text.substr(at + 1)) + ")", '(', ')');
        if (!lamps || !pos || pos->size() != 1)
            return std::nullopt;
        std::sort(lamps->begin(), lamps->end());
        if (std::adjacent_find(lamps->begin(), lamps->end()) != lamps->end())
            return std::nullopt;
        return encode((*pos)[0], *lamps);
    }

private:
    static std::vector<std::int64_t> decode(const Payload& p) {
        std::vector<std::int64_t> lit;
        if (p.size() < 3)
            return lit;
        std::int64_t base = p[1];
        for (std::size_t w = 2; w < p.size(); ++w) {
            auto u = static_cast<std::uint64_t>(p[w]);
            while (u) {
                int bit = std::countr_zero(u);
                lit.push_back(base + static_cast<std::int64_t>(64 * (w - 2)) + bit);
                u &= u - 1;
            }
        }
        return lit;
    }

    // `lit` must be sorted and duplicate free.
    static Payload encode(std::int64_t pos, const std::vector<std::int64_t>& lit) {
        Payload p{pos};
        if (lit.empty())
            return p;
        std::int64_t base = lit.front();
        p.push_back(base);
        for (auto x : lit) {
            auto off = static_cast<std::size_t>(x - base);
            std::size_t w = 2 + off / 64;
            while (p.size() <= w)
                p.push_back(0);
            p[w] = static_cast<std::int64_t>(static_cast<std::uint64_t>(p[w]) | (1ULL << (off % 64)));
        }
        return p;
    }
};

// ---------------------------------------------------------------------------
// Baumslag-Solitar BS(1,2) = <a, t | t a t^-1 = a^2> as affine maps
// x -> 2^k x + num / 2^m. Payload (k, num, m): m >= 0, num odd when m > 0,
// and m = 0 when num = 0. Product is composition: (ab)(x) = a(b(x)).

class BaumslagSolitar final : public Group {
public:
    BaumslagSolitar() : Group({GroupKind::BaumslagSolitar, 2}, "bs.BS12", "at") {
        set_generators({make({0, 1, 0}), make({1, 0, 0})});
    }

    std::string description() const override {
        return "Baumslag-Solitar group BS(1,2) (a: x->x+1, t: x->2x)";
    }
    GroupElement identity() const override { return make({0, 0, 0}); }

    std::string format(const GroupElement& a) const override {
        check(a);
        return join_ints({a.word.begin(), a.word.end()}, '(', ')');
    }

    std::optional<std::pair<GroupElement, GroupElement>> free_semigroup_pair() const override {
        // x -> 2x and x -> 2x + 1: positive words read off binary expansions.
        const auto& a = generators()[0];
        const auto& t = generators()[1];
        return std::pair{t, multiply(a, t)};
    }

protected:
    Payload multiply_payload(const Payload& x, const Payload& y) const override {
        // 2^{k1} * num2 / 2^{m2} + num1 / 2^{m1}
        __int128 n2 = y[1];
        std::int64_t m2 = y[2] - x[0];
        if (m2 < 0) {
            n2 = shift_left(n2, -m2);
            m2 = 0;
        }
        __int128 n1 = x[1];
        std::int64_t m1 = x[2];
        std::int64_t m = std::max(m1, m2);
        __int128 num = shift_left(n1, m - m1) + shift_left(n2, m - m2);
        return normalized(x[0] + y[0], num, m);
    }

    Payload inverse_payload(const Payload& x) const override {
        // x -> 2^{-k}(y - b): offset -num / 2^{m + k}
        std::int64_t m = x[2] + x[0];
        __int128 num = -static_cast<__int128>(x[1]);
        if (m < 0) {
            num = shift_left(num, -m);
            m = 0;
        }
        return normalized(-x[0], num, m);
    }

    std::optional<Payload> parse_normal_form(std::string_view text) const override {
        auto v = parse_int_list(text, '(', ')');
        if (!v || v->size() != 3 || (*v)[2] < 0)
            return std::nullopt;
        auto p = normalized((*v)[0], (*v)[1], (*v)[2]);
        return p;
    }

private:
    static __int128 shift_left(__int128 v, std::int64_t s) {
        if (s >= 62 && v != 0)
            throw BudgetExceeded("BS(1,2) normal form exceeds 62-bit dyadic numerators", 0);
        __int128 r = v * (static_cast<__int128>(1) << s);
        return r;
    }

    static Payload normalized(std::int64_t k, __int128 num, std::int64_t m) {
        if (num == 0)
            return {k, 0, 0};
        while (m > 0 && num % 2 == 0) {
            num /= 2;
            --m;
        }
        constexpr __int128 limit = static_cast<__int128>(1) << 62;
        if (num >= limit || num <= -limit)
            throw BudgetExceeded("BS(1,2) normal form exceeds 62-bit dyadic numerators", 0);
        return {k, static_cast<std::int64_t>(num), m};
    }
};

// ---------------------------------------------------------------------------
// Finitary permutations, the locally finite tower S_1 < S_2 < ... < S_16.
// Payload is empty for the identity, otherwise one entry whose nibble i holds
// sigma(i) XOR i. Product (sigma tau)(i) = sigma(tau(i)).

class SymmetricTower final : public Group {
public:
    static constexpr int kMaxDegree = 16;

    SymmetricTower() : Group({GroupKind::SymmetricTower, kMaxDegree}, "locfin.Sinf", "abcdfghijklmnop") {
        std::vector<GroupElement> gens;
        for (int i = 0; i + 1 < kMaxDegree; ++i) {
            Perm p = identity_perm();
            std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i + 1)]);
            gens.push_back(make(encode(p)));
        }
        set_generators(std::move(gens));
    }

    std::string description() const override {
        return "finitary symmetric group, union of S_2 < S_3 < ... < S_16 (letters = adjacent transpositions)";
    }

    std::size_t default_generator_count() const override { return 4; }
    bool is_locally_finite() const override { return true; }

    std::string format(const GroupElement& a) const override {
        check(a);
        Perm p = decode(a.word);
        int n = degree(p);
        std::vector<std::int64_t> images(p.begin(), p.begin() + n);
        return join_ints(images, '[', ']');
    }

protected:
    Payload multiply_payload(const Payload& a, const Payload& b) const override {
        Perm s = decode(a), t = decode(b), r{};
        for (int i = 0; i < kMaxDegree; ++i)
            r[static_cast<std::size_t>(i)] = s[t[static_cast<std::size_t>(i)]];
        return encode(r);
    }
    Payload inverse_payload(const Payload& a) const override {
        Perm s = decode(a), r{};
        for (int i = 0; i < kMaxDegree; ++i)
            r[s[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
        return encode(r);
    }
    std::optional<Payload> parse_normal_form(std::string_view text) const override {
        auto v = parse_int_list(text, '[', ']');
        if (!v || v->size() > kMaxDegree)
            return std::nullopt;
        Perm p = identity_perm();
        std::vector<bool> hit(v->size(), false);
        for (std::size_t i = 0; i < v->size(); ++i) {
            auto x = (*v)[i];
            if (x < 0 || static_cast<std::size_t>(x) >= v->size() || hit[static_cast<std::size_t>(x)])
                return std::nullopt;
            hit[static_cast<std::size_t>(x)] = true;
            p[i] = static_cast<std::uint8_t>(x);
        }
        return encode(p);
    }

private:
    using Perm = std::array<std::uint8_t, kMaxDegree>;

    static Perm identity_perm() {
        Perm p{};
        std::iota(p.begin(), p.end(), std::uint8_t{0});
        return p;
    }
    static int degree(const Perm& p) {
        int n = kMaxDegree;
        while (n > 0 && p[static_cast<std::size_t>(n - 1)] == n - 1)
            --n;
        return n;
    }
    static Perm decode(const Payload& w) {
        Perm p = identity_perm();
        if (w.empty())
            return p;
        auto u = static_cast<std::uint64_t>(w[0]);
        for (int i = 0; i < kMaxDegree; ++i)
            p[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i ^ ((u >> (4 * i)) & 0xF));
        return p;
    }
    static Payload encode(const Perm& p) {
        std::uint64_t u = 0;
        for (int i = 0; i < kMaxDegree; ++i)
            u |= static_cast<std::uint64_t>(p[static_cast<std::size_t>(i)] ^ i) << (4 * i);
        if (u == 0)
            return {};
        return {static_cast<std::int64_t>(u)};
    }
};

// ---------------------------------------------------------------------------
// Countable direct sum of Z_2: finite bit vectors, trailing zero words trimmed.

class BooleanSum final : public Group {
public:
    BooleanSum() : Group({GroupKind::BooleanSum, 2}, "locfin.Z2sum", "abcdfghijklmnopqrstuvwxyz") {
        std::vector<GroupElement> gens;
        for (int i = 0; i < 25; ++i)
            gens.push_back(make({static_cast<std::int64_t>(1ULL << i)}));
        set_generators(std::move(gens));
    }

    std::string description() const override {
        return "countable direct sum of Z2 (letters a..z without e = coordinate generators g0..g24)";
    }

    std::size_t default_generator_count() const override { return 6; }
    bool is_abelian() const override { return true; }
    bool is_locally_finite() const override { return true; }

    /// Length with respect to all coordinate generators.
    std::int64_t word_length(const GroupElement& a, std::size_t) const override {
        check(a);
        std::int64_t n = 0;
        for (auto w : a.word)
            n += std::popcount(static_cast<std::uint64_t>(w));
        return n;
    }

    std::string format(const GroupElement& a) const override {
        check(a);
        std::vector<std::int64_t> bits;
        for (std::size_t w = 0; w < a.word.size(); ++w) {
            auto u = static_cast<std::uint64_t>(a.word[w]);
            while (u) {
                bits.push_back(static_cast<std::int64_t>(64 * w) + std::countr_zero(u));
                u &= u - 1;
            }
        }
        return join_ints(bits, '{', '}');
    }

protected:
    Payload multiply_payload(const Payload& a, const Payload& b) const override {
        Payload c(std::max(a.size(), b.size()), 0);
        for (std::size_t i = 0; i < a.size(); ++i)
            c[i] ^= a[i];
        for (std::size_t i = 0; i < b.size(); ++i)
            c[i] ^= b[i];
        while (!c.empty() && c.back() == 0)
            c.pop_back();
        return c;
    }
    Payload inverse_payload(const Payload& a) const override { return a; }
    std::optional<Payload> parse_normal_form(std::string_view text) const override {
        auto v = parse_int_list(text, '{', '}');
        if (!v)
            return std::nullopt;
        Payload p;
        for (auto bit : *v) {
            if (bit < 0 || bit >= 64 * 64)
                return std::nullopt;
            auto w = static_cast<std::size_t>(bit / 64);
            while (p.size() <= w)
                p.push_back(0);
            p[w] = static_cast<std::int64_t>(static_cast<std::uint64_t>(p[w]) ^ (1ULL << (bit % 64)));
        }
        while (!p.empty() && p.back() == 0)
            p.pop_back();
        return p;
    }
};

struct Catalog {
    std::vector<std::unique_ptr<Group>> groups;

    Catalog() {
        groups.push_back(std::make_unique<AbelianLattice>(0));
        for (int d = 1; d <= 4; ++d)
            groups.push_back(std::make_unique<AbelianLattice>(d));
        for (int k = 1; k <= 4; ++k)
            groups.push_back(std::make_unique<FreeGroup>(k));
        groups.push_back(std::make_unique<Heisenberg>());
        groups.push_back(std::make_unique<Lamplighter>());
        groups.push_back(std::make_unique<BaumslagSolitar>());
        groups.push_back(std::make_unique<SymmetricTower>());
        groups.push_back(std::make_unique<BooleanSum>());
    }
};

const Catalog& catalog() {
    static const Catalog c;
    return c;
}

}  // namespace

const Group& catalog_group(std::string_view name) {
    for (const auto& g : catalog().groups)
        if (g->name() == name)
            return *g;
    throw InvalidInput("unknown catalog group '" + std::string(name) + "'");
}

const Group& catalog_group(GroupId id) {
    for (const auto& g : catalog().groups)
        if (g->id() == id)
            return *g;
    throw InvalidInput("unknown catalog group id");
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (const auto& g : catalog().groups)
        names.push_back(g->name());
    return names;
}

}  // namespace specrad
