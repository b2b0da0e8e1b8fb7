#include "specrad/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <absl/container/flat_hash_map.h>

#include "specrad/errors.hpp"
#include "specrad/growth.hpp"

namespace specrad {
namespace {

bool term_less(const AlgebraElement::Term& a, const AlgebraElement::Term& b) { return a.first < b.first; }

void same_group(const AlgebraElement& f, const AlgebraElement& g) {
    if (f.group().id() != g.group().id())
        throw GroupMismatch("algebra elements live on different groups: " + f.group().name() + " vs " +
                            g.group().name());
}

}  // namespace

void CompensatedSum::add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

AlgebraElement::AlgebraElement(const Group& g, std::vector<Term> terms) : group_(&g) {
    for (const auto& t : terms)
        g.check(t.first);
    std::stable_sort(terms.begin(), terms.end(), term_less);
    for (auto& t : terms) {
        if (!terms_.empty() && terms_.back().first == t.first)
            terms_.back().second += t.second;
        else
            terms_.push_back(std::move(t));
    }
    std::erase_if(terms_, [](const Term& t) { return t.second == Complex(0.0, 0.0); });
}

AlgebraElement AlgebraElement::from_sorted(const Group& g, std::vector<Term> terms, double dropped_mass) {
    AlgebraElement f(g);
    f.terms_ = std::move(terms);
    f.dropped_mass_ = dropped_mass;
    return f;
}

AlgebraElement AlgebraElement::delta(const Group& g, const GroupElement& x, Complex c) {
    return AlgebraElement(g, {{x, c}});
}

AlgebraElement AlgebraElement::normalized_indicator(const GeneratingSet& S) {
    if (S.size() == 0)
        return AlgebraElement(S.group());
    return indicator(S.group(), S.elements(), 1.0 / static_cast<double>(S.size()));
}

AlgebraElement AlgebraElement::indicator(const Group& g, const std::vector<GroupElement>& xs, Complex c) {
    std::vector<Term> t;
    t.reserve(xs.size());
    for (const auto& x : xs)
        t.emplace_back(x, c);
    return AlgebraElement(g, std::move(t));
}

Complex AlgebraElement::coefficient(const GroupElement& x) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), Term{x, 0.0}, term_less);
    if (it != terms_.end() && it->first == x)
        return it->second;
    return 0.0;
}

std::vector<GroupElement> AlgebraElement::support() const {
    std::vector<GroupElement> s;
    s.reserve(terms_.size());
    for (const auto& t : terms_)
        s.push_back(t.first);
    return s;
}

bool AlgebraElement::is_hermitian(double tol) const {
    double scale = std::max(p_norm(*this, 1.0), 1e-300);
    for (const auto& [x, c] : terms_) {
        Complex other = std::conj(coefficient(group_->inverse(x)));
        if (std::abs(c - other) > tol * scale)
            return false;
    }
    return true;
}

AlgebraElement& AlgebraElement::operator*=(Complex c) {
    if (c == Complex(0.0, 0.0)) {
        terms_.clear();
        dropped_mass_ = 0.0;
        return *this;
    }
    for (auto& t : terms_)
        t.second *= c;
    std::erase_if(terms_, [](const Term& t) { return t.second == Complex(0.0, 0.0); });
    dropped_mass_ *= std::abs(c);
    return *this;
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    same_group(a, b);
    std::vector<AlgebraElement::Term> t(a.terms());
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    AlgebraElement r(a.group(), std::move(t));
    r.set_dropped_mass(a.dropped_mass() + b.dropped_mass());
    return r;
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) { return a + Complex(-1.0) * b; }

AlgebraElement convolve(const AlgebraElement& f, const AlgebraElement& g, const TruncationPolicy& policy) {
    same_group(f, g);
    const Group& G = f.group();
    absl::flat_hash_map<GroupElement, Complex, ElementHash> acc;
    acc.reserve(std::min(f.size() * g.size(), policy.max_support + 1));
    for (const auto& [s, a] : f.terms()) {
        for (const auto& [t, b] : g.terms()) {
            acc[G.multiply(s, t)] += a * b;
            if (acc.size() > policy.max_support)
                throw BudgetExceeded("convolution support exceeds " + std::to_string(policy.max_support) +
                                         " elements",
                                     0);
        }
    }
    std::vector<AlgebraElement::Term> terms;
    terms.reserve(acc.size());
    for (auto& [x, c] : acc)
        if (c != Complex(0.0, 0.0))
            terms.emplace_back(x, c);
    std::sort(terms.begin(), terms.end(), term_less);
    double pruned = 0.0;
    if (policy.prune_threshold > 0.0) {
        std::erase_if(terms, [&](const AlgebraElement::Term& t) {
            double m = std::abs(t.second);
            if (m >= policy.prune_threshold)
                return false;
            pruned += m;
            return true;
        });
    }

    double dropped = 0.0;
    if (!f.exact() || !g.exact() || pruned > 0.0) {
        double nf = p_norm(f, 1.0), ng = p_norm(g, 1.0);
        dropped = f.dropped_mass() * (ng + g.dropped_mass()) + nf * g.dropped_mass() + pruned;
    }
    return AlgebraElement::from_sorted(G, std::move(terms), dropped);
}

AlgebraElement apply(const AlgebraElement& f, const AlgebraElement& v, const TruncationPolicy& policy) {
    return convolve(f, v, policy);
}

AlgebraElement involute(const AlgebraElement& f) {
    std::vector<AlgebraElement::Term> t;
    t.reserve(f.size());
    for (const auto& [x, c] : f.terms())
        t.emplace_back(f.group().inverse(x), std::conj(c));
    std::sort(t.begin(), t.end(), term_less);
    return AlgebraElement::from_sorted(f.group(), std::move(t), f.dropped_mass());
}

AlgebraElement convolution_power(const AlgebraElement& f, std::size_t n, const TruncationPolicy& policy) {
    if (n < 1)
        throw InvalidInput("convolution_power needs n >= 1");
    std::size_t squarings = 0;
    try {
        std::optional<AlgebraElement> result;
        AlgebraElement base = f;
        while (true) {
            if (n & 1U)
                result = result ? convolve(*result, base, policy) : base;
            n >>= 1U;
            if (n == 0)
                break;
            base = convolve(base, base, policy);
            ++squarings;
        }
        return *result;
    } catch (const BudgetExceeded& e) {
        throw BudgetExceeded(e.what(), squarings);
    }
}

double p_norm(const AlgebraElement& f, double p) {
    if (p < 1.0)
        throw InvalidInput("p_norm needs p >= 1");
    double mx = 0.0;
    for (const auto& t : f.terms())
        mx = std::max(mx, std::abs(t.second));
    if (std::isinf(p) || mx == 0.0)
        return mx;
    CompensatedSum s;
    if (p == 1.0) {
        for (const auto& t : f.terms())
            s.add(std::abs(t.second));
        return s.value();
    }
    if (p == 2.0) {
        for (const auto& t : f.terms()) {
            double r = std::abs(t.second) / mx;
            s.add(r * r);
        }
        return mx * std::sqrt(s.value());
    }
    for (const auto& t : f.terms())
        s.add(std::pow(std::abs(t.second) / mx, p));
    return mx * std::pow(s.value(), 1.0 / p);
}

double p_norm(const AlgebraElement& f, const Exponent& p) { return p_norm(f, p.value()); }

Complex inner_product(const AlgebraElement& f, const AlgebraElement& g) {
    same_group(f, g);
    CompensatedSum re, im;
    auto i = f.terms().begin();
    auto j = g.terms().begin();
    while (i != f.terms().end() && j != g.terms().end()) {
        if (i->first < j->first) {
            ++i;
        } else if (j->first < i->first) {
            ++j;
        } else {
            Complex z = i->second * std::conj(j->second);
            re.add(z.real());
            im.add(z.imag());
            ++i;
            ++j;
        }
    }
    return {re.value(), im.value()};
}

AlgebraElement modulus(const AlgebraElement& f) {
    auto t = f.terms();
    for (auto& x : t)
        x.second = std::abs(x.second);
    return AlgebraElement::from_sorted(f.group(), std::move(t), f.dropped_mass());
}

}  // namespace specrad
