#pragma once

#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specrad/algebra.hpp"
#include "specrad/estimate.hpp"
#include "specrad/exponent.hpp"
#include "specrad/growth.hpp"
#include "specrad/spectral.hpp"

namespace specrad {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// A computed quantity as a bracket. Exact values have lower == upper.
struct Quantity {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
    std::string method;
    Certificate lower_certificate;
    Certificate upper_certificate;
    std::optional<double> estimate;

    static Quantity exact_value(std::string name, double v, std::string method);
    static Quantity bracket(std::string name, double lower, double upper, std::string method);
    static Quantity from_estimate(std::string name, const SpectralEstimate& e);
};

/// How a claim `lhs <= rhs` is read off two brackets.
///
/// Consistent: pass when lhs.lower <= rhs.upper, i.e. no certified bound
/// contradicts the claim; fail when lhs.lower > rhs.upper. Inconclusive only
/// when one of those two ends is not finite.
///
/// Certified: pass only when lhs.upper <= rhs.lower proves the claim, fail
/// when lhs.lower > rhs.upper, inconclusive in between.
enum class ComparisonMode { Consistent, Certified };

struct Comparison {
    std::string lhs;
    std::string rhs;
    bool strict = false;
    ComparisonMode mode = ComparisonMode::Consistent;
    Verdict verdict = Verdict::Inconclusive;
    /// Slack between the two ends the verdict reads: rhs.upper - lhs.lower
    /// (consistent) or rhs.lower - lhs.upper (certified).
    double margin = 0.0;
    /// The brackets prove the claim (lhs.upper <= rhs.lower within tolerance).
    bool certified = false;
    std::string note;
};

struct Decision {
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0.0;
    bool certified = false;
};

/// Tolerance is relative, applied on the favourable side.
Decision decide(const Quantity& lhs, const Quantity& rhs, bool strict, ComparisonMode mode, double tol);

struct ExperimentReport {
    std::string id;
    std::string kind;
    std::string group;
    nlohmann::json inputs = nlohmann::json::object();
    std::vector<Quantity> quantities;
    std::vector<Comparison> comparisons;
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0.0;
    std::vector<std::string> notes;
    nlohmann::json details = nlohmann::json::object();
    bool budget_exhausted = false;
    double tolerance = 1e-6;

    const Quantity& quantity(const std::string& name) const;
    bool has_quantity(const std::string& name) const;
    void add(Quantity q);
    /// Decides `lhs <= rhs` (or `<`) on already added quantities.
    const Comparison& compare(const std::string& lhs, const std::string& rhs, bool strict = false,
                              std::string note = "", ComparisonMode mode = ComparisonMode::Consistent);
    /// Records a violated structural precondition as a certified failure.
    void fail(std::string note);
    /// Overall verdict: fail if any comparison fails, pass if all pass.
    void finalize();
    /// Every comparison is proven by its brackets.
    bool certified() const;
};

/// Copies the quantities and comparisons of `part` into `agg` with every
/// quantity name prefixed by `tag`. Notes are prefixed too; details go to
/// agg.details[tag] and the budget flag is or-ed in.
void absorb(ExperimentReport& agg, const ExperimentReport& part, const std::string& tag);

/// Recomputes every comparison from the stored quantities; false when a
/// stored verdict disagrees or refers to an unknown quantity.
bool validate_report(const ExperimentReport& r);

struct LabOptions {
    double tol = 1e-6;
    TruncationPolicy policy{0.0, 5'000'000};
    /// Product-set budget for growth-rate brackets.
    std::size_t growth_budget = 2'000'000;
    std::size_t growth_levels = 12;
    std::size_t max_doublings = 4;
    std::size_t max_moments = 12;
    /// Radius of the l^2 truncation bound.
    std::size_t radius = 6;
    TruncationOptions truncation{10'000, 1e-10, 200'000};
    LpOptions lp;
    double kesten_tol = 0.05;
};

/// Bracket for the spectral radius of f in l^1, PF*_p and C*_r at once when
/// the group makes them coincide (abelian: Gelfand transform; locally finite:
/// finite subgroup generated by supp f). Empty otherwise.
std::optional<Quantity> coinciding_radius_oracle(const AlgebraElement& f);

ExperimentReport check_pf_interpolation(const AlgebraElement& f, const InterpolationParams& params,
                                        const LabOptions& opt = {});

/// Same check on precomputed PF*_p brackets for p1, p2 and p3.
ExperimentReport interpolation_from_brackets(const SpectralEstimate& b1, const SpectralEstimate& b2,
                                             const SpectralEstimate& b3, const InterpolationParams& params,
                                             double tol = 1e-6);

ExperimentReport check_growth_chain(const AlgebraElement& f, const GeneratingSet& S, const Exponent& p,
                                    std::size_t n, const LabOptions& opt = {});

/// check_growth_chain for every p in `ps` and n = 1..n_max, sharing the
/// product sets and the powers of f. Reports are ordered by p, then n.
std::vector<ExperimentReport> growth_chain_grid(const AlgebraElement& f, const GeneratingSet& S,
                                               const std::vector<Exponent>& ps, std::size_t n_max,
                                               const LabOptions& opt = {});

ExperimentReport check_spectral_growth_bound(const AlgebraElement& f, const GeneratingSet& S, const Exponent& q,
                                             const LabOptions& opt = {});

ExperimentReport check_kesten_growth_lemma(const GeneratingSet& S, const Exponent& p, const LabOptions& opt = {});

/// r_cstar(h_S) bracket for symmetric S with a classification: amenable-consistent
/// when the lower end reaches 1 - kesten_tol, non-amenable-certified when the
/// upper end is below it. The moment extrapolation is reported as a flag only.
ExperimentReport kesten_amenability_probe(const GeneratingSet& S, const LabOptions& opt = {});

struct WitnessCoefficients {
    Complex a0{1.0 / 3.0, 0.0};
    Complex a1{0.0, 1.0 / 3.0};
    Complex a2{1.0 / 3.0, 0.0};
};

/// Certified bracket for sup |a0 + a1 z + a2 z^2| over the unit circle.
SpectralEstimate circle_sup(const WitnessCoefficients& c, double tol = 1e-12);

/// f = a0 delta_t + a1 delta_(st) + a2 delta_(s^2 t) over a free semigroup
/// <s, t>. Throws InvalidInput when the semigroup check fails, a coefficient
/// modulus differs from 1/3, or the circle sup is not certified below 1.
ExperimentReport jenkins_witness(const Group& g, const GroupElement& s, const GroupElement& t,
                                 const WitnessCoefficients& coeffs, std::size_t n_max, const LabOptions& opt = {},
                                 std::size_t g_moments = 200);

/// ||lambda_2(f)|| <= C (sum (1 + |s|)^(2 alpha) |f(s)|^2)^(1/2), word length
/// from the default generators.
ExperimentReport check_rd_bound(const AlgebraElement& f, double alpha, double C, const LabOptions& opt = {});

/// Runs check_rd_bound on `samples` random elements supported on the sphere
/// of the given radius and reports the largest lower-bound ratio found.
ExperimentReport rd_falsifier_search(const Group& g, double alpha, double C, std::size_t sphere_radius,
                                     std::size_t samples, std::uint64_t seed, const LabOptions& opt = {});

/// Random Hermitian element sum c_i delta_(x_i) + conj(c_i) delta_(x_i^-1)
/// with `terms` points drawn from `pool`, normalised to ||f||_1 = 1. With
/// `real` the coefficients are real.
AlgebraElement random_hermitian(const Group& g, const std::vector<GroupElement>& pool, std::size_t terms,
                                std::mt19937_64& rng, bool real = false);

/// Elements of the radius-r product set of the standard generators with e.
std::vector<GroupElement> element_pool(const Group& g, std::size_t radius, std::size_t max_elements = 100'000);

}  // namespace specrad
