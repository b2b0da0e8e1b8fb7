#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "specrad/exponent.hpp"
#include "specrad/group.hpp"

namespace specrad {

class GeneratingSet;

using Complex = std::complex<double>;

/// Finitely supported complex function on a catalog group. Terms are kept
/// sorted by the group-element order and never hold an exact zero.
class AlgebraElement {
public:
    using Term = std::pair<GroupElement, Complex>;

    explicit AlgebraElement(const Group& g) : group_(&g) {}
    /// Sums coefficients of repeated elements and drops zeros.
    AlgebraElement(const Group& g, std::vector<Term> terms);

    /// Takes terms that are already sorted, unique and nonzero.
    static AlgebraElement from_sorted(const Group& g, std::vector<Term> terms, double dropped_mass = 0.0);
    static AlgebraElement zero(const Group& g) { return AlgebraElement(g); }
    static AlgebraElement delta(const Group& g, const GroupElement& x, Complex c = 1.0);
    static AlgebraElement identity(const Group& g) { return delta(g, g.identity()); }
    /// h_S = 1_S / |S|.
    static AlgebraElement normalized_indicator(const GeneratingSet& S);
    /// Indicator of an arbitrary finite set (duplicates are summed).
    static AlgebraElement indicator(const Group& g, const std::vector<GroupElement>& xs, Complex c = 1.0);

    const Group& group() const { return *group_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    Complex coefficient(const GroupElement& x) const;
    std::vector<GroupElement> support() const;

    /// Upper bound on the l^1 distance from the exact value (0 when exact).
    double dropped_mass() const { return dropped_mass_; }
    void set_dropped_mass(double d) { dropped_mass_ = d; }
    bool exact() const { return dropped_mass_ == 0.0; }

    /// f == f* up to `tol` times ||f||_1, coefficientwise.
    bool is_hermitian(double tol = 1e-12) const;

    AlgebraElement& operator*=(Complex c);
    friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
    friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
    friend AlgebraElement operator*(Complex c, AlgebraElement a) { return a *= c; }

private:
    const Group* group_;
    std::vector<Term> terms_;
    double dropped_mass_ = 0.0;
};

struct TruncationPolicy {
    /// Coefficients with modulus below this are removed and their mass is
    /// booked in dropped_mass. 0 keeps everything.
    double prune_threshold = 0.0;
    std::size_t max_support = 5'000'000;
};

/// (f*g)(t) = sum_s f(s) g(s^-1 t). Throws BudgetExceeded (completed = 0)
/// when the raw product support exceeds policy.max_support.
AlgebraElement convolve(const AlgebraElement& f, const AlgebraElement& g, const TruncationPolicy& policy = {});
/// Convolution operator lambda(f) applied to the vector v.
AlgebraElement apply(const AlgebraElement& f, const AlgebraElement& v, const TruncationPolicy& policy = {});
/// f*(s) = conj(f(s^-1)).
AlgebraElement involute(const AlgebraElement& f);
/// f^n by repeated squaring. BudgetExceeded reports the number of completed
/// squarings.
AlgebraElement convolution_power(const AlgebraElement& f, std::size_t n, const TruncationPolicy& policy = {});

/// (sum |f(s)|^p)^(1/p), max |f(s)| for p = inf. Compensated and scaled.
double p_norm(const AlgebraElement& f, double p);
double p_norm(const AlgebraElement& f, const Exponent& p);
/// <f, g> = sum_t f(t) conj(g(t)).
Complex inner_product(const AlgebraElement& f, const AlgebraElement& g);
/// |f| pointwise.
AlgebraElement modulus(const AlgebraElement& f);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace specrad
