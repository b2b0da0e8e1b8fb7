#include "specrad/lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "specrad/errors.hpp"
#include "specrad/fourier.hpp"

namespace specrad {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Quantity Quantity::exact_value(std::string name, double v, std::string method) {
    Quantity q;
    q.name = std::move(name);
    q.lower = q.upper = v;
    q.exact = true;
    q.method = std::move(method);
    return q;
}

Quantity Quantity::bracket(std::string name, double lower, double upper, std::string method) {
    Quantity q;
    q.name = std::move(name);
    q.lower = lower;
    q.upper = upper;
    q.method = std::move(method);
    return q;
}

Quantity Quantity::from_estimate(std::string name, const SpectralEstimate& e) {
    Quantity q;
    q.name = std::move(name);
    q.lower = e.lower;
    q.upper = e.upper;
    q.method = e.method;
    q.lower_certificate = e.lower_certificate;
    q.upper_certificate = e.upper_certificate;
    q.estimate = e.estimate;
    return q;
}

Decision decide(const Quantity& lhs, const Quantity& rhs, bool strict, ComparisonMode mode, double tol) {
    Decision d;
    const double pass_scale = std::max(std::abs(lhs.upper), std::abs(rhs.lower));
    const double fail_scale = std::max(std::abs(lhs.lower), std::abs(rhs.upper));
    d.certified = strict ? lhs.upper + tol * pass_scale < rhs.lower : lhs.upper <= rhs.lower + tol * pass_scale;
    const bool violated = strict ? lhs.lower >= rhs.upper + tol * fail_scale : lhs.lower > rhs.upper + tol * fail_scale;
    if (mode == ComparisonMode::Certified) {
        d.margin = rhs.lower - lhs.upper;
        d.verdict = d.certified ? Verdict::Pass : (violated ? Verdict::Fail : Verdict::Inconclusive);
        return d;
    }
    d.margin = rhs.upper - lhs.lower;
    if (!std::isfinite(lhs.lower) || !std::isfinite(rhs.upper))
        d.verdict = Verdict::Inconclusive;
    else
        d.verdict = violated ? Verdict::Fail : Verdict::Pass;
    return d;
}

const Quantity& ExperimentReport::quantity(const std::string& name) const {
    for (const auto& q : quantities)
        if (q.name == name)
            return q;
    throw InvalidInput("report " + id + " has no quantity '" + name + "'");
}

bool ExperimentReport::has_quantity(const std::string& name) const {
    return std::any_of(quantities.begin(), quantities.end(), [&](const Quantity& q) { return q.name == name; });
}

void ExperimentReport::add(Quantity q) {
    for (auto& existing : quantities)
        if (existing.name == q.name) {
            existing = std::move(q);
            return;
        }
    quantities.push_back(std::move(q));
}

const Comparison& ExperimentReport::compare(const std::string& lhs, const std::string& rhs, bool strict,
                                            std::string note, ComparisonMode mode) {
    Comparison c;
    c.lhs = lhs;
    c.rhs = rhs;
    c.strict = strict;
    c.mode = mode;
    c.note = std::move(note);
    auto d = decide(quantity(lhs), quantity(rhs), strict, mode, tolerance);
    c.verdict = d.verdict;
    c.margin = d.margin;
    c.certified = d.certified;
    comparisons.push_back(std::move(c));
    return comparisons.back();
}

void ExperimentReport::fail(std::string note) {
    Comparison c;
    c.lhs = "precondition";
    c.rhs = "precondition";
    c.verdict = Verdict::Fail;
    c.margin = -std::numeric_limits<double>::infinity();
    c.note = std::move(note);
    notes.push_back(c.note);
    comparisons.push_back(std::move(c));
}

void ExperimentReport::finalize() {
    bool any_fail = false, all_pass = true;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : comparisons) {
        any_fail = any_fail || c.verdict == Verdict::Fail;
        all_pass = all_pass && c.verdict == Verdict::Pass;
        m = std::min(m, c.margin);
    }
    verdict = any_fail ? Verdict::Fail : (all_pass ? Verdict::Pass : Verdict::Inconclusive);
    margin = comparisons.empty() ? 0.0 : m;
}

bool ExperimentReport::certified() const {
    return std::all_of(comparisons.begin(), comparisons.end(),
                       [](const Comparison& c) { return c.lhs != "precondition" && c.certified; });
}

void absorb(ExperimentReport& agg, const ExperimentReport& part, const std::string& tag) {
    for (auto q : part.quantities) {
        q.name = tag + q.name;
        agg.add(std::move(q));
    }
    for (auto c : part.comparisons) {
        if (c.lhs != "precondition") {
            c.lhs = tag + c.lhs;
            c.rhs = tag + c.rhs;
        }
        agg.comparisons.push_back(std::move(c));
    }
    for (const auto& n : part.notes)
        agg.notes.push_back(tag + n);
    if (!part.details.empty())
        agg.details[tag] = part.details;
    agg.budget_exhausted = agg.budget_exhausted || part.budget_exhausted;
}

bool validate_report(const ExperimentReport& r) {
    for (const auto& c : r.comparisons) {
        if (c.lhs == "precondition") {
            if (c.verdict != Verdict::Fail)
                return false;
            continue;
        }
        if (!r.has_quantity(c.lhs) || !r.has_quantity(c.rhs))
            return false;
        auto d = decide(r.quantity(c.lhs), r.quantity(c.rhs), c.strict, c.mode, r.tolerance);
        if (d.verdict != c.verdict || d.certified != c.certified)
            return false;
    }
    return true;
}

std::optional<Quantity> coinciding_radius_oracle(const AlgebraElement& f) {
    const Group& G = f.group();
    if (G.is_abelian()) {
        auto e = abelian_spectral_radius_exact(f);
        return Quantity::from_estimate("radius_oracle", e);
    }
    if (G.is_locally_finite()) {
        double r = finite_subgroup_spectral_radius(f);
        double slack = 1e-10 * std::max(p_norm(f, 1.0), r);
        auto q = Quantity::bracket("radius_oracle", std::max(0.0, r - slack), r + slack,
                                   "dense spectrum on the finite subgroup generated by supp f");
        return q;
    }
    return std::nullopt;
}

namespace {

void tighten(Quantity& q, const std::optional<Quantity>& oracle) {
    if (!oracle)
        return;
    q.lower = std::max(q.lower, oracle->lower);
    q.upper = std::min(q.upper, oracle->upper);
    q.method += "; " + oracle->method;
}

void require_support_in(const AlgebraElement& f, const GeneratingSet& S) {
    for (const auto& [x, c] : f.terms())
        if (!S.contains(x))
            throw InvalidInput("supp f is not contained in S");
}

std::string exponent_label(const Exponent& p) { return p.str(); }

SpectralEstimate nu_bracket(const GeneratingSet& S, const LabOptions& opt, ExperimentReport& r) {
    auto seq = product_set_sequence(S, std::max<std::size_t>(opt.growth_levels, 2), {opt.growth_budget, true});
    if (!seq.complete) {
        r.notes.push_back("product sets stopped at n = " + std::to_string(seq.sizes.size()) +
                          " by the element budget");
    }
    if (seq.sizes.size() < 2) {
        SpectralEstimate e;
        e.target = Target::GrowthRate;
        e.method = "|S|";
        e.lower = 1.0;
        e.upper = static_cast<double>(S.size());
        e.upper_certificate.push(1, e.upper);
        e.lower_certificate.push(1, 1.0);
        e.complete = false;
        return e;
    }
    return growth_rate_estimate(seq);
}

}  // namespace

ExperimentReport interpolation_from_brackets(const SpectralEstimate& b1, const SpectralEstimate& b2,
                                             const SpectralEstimate& b3, const InterpolationParams& ip,
                                             double tol) {
    ExperimentReport r;
    r.kind = "interpolate";
    r.tolerance = tol;
    r.inputs["p"] = {ip.p1.str(), ip.p2.str(), ip.p3.str()};
    r.inputs["theta"] = ip.theta.str();
    const double t = ip.theta_value();
    r.add(Quantity::from_estimate("pf_p1", b1));
    r.add(Quantity::from_estimate("pf_p2", b2));
    r.add(Quantity::from_estimate("pf_p3", b3));
    r.add(Quantity::bracket("pf_p1^(1-theta) pf_p3^theta", std::pow(b1.lower, 1 - t) * std::pow(b3.lower, t),
                            std::pow(b1.upper, 1 - t) * std::pow(b3.upper, t), "product of brackets"));
    r.compare("pf_p2", "pf_p1^(1-theta) pf_p3^theta");
    r.finalize();
    return r;
}

ExperimentReport check_pf_interpolation(const AlgebraElement& f, const InterpolationParams& ip,
                                        const LabOptions& opt) {
    auto b1 = pfstar_norm_bounds(f, ip.p1, opt.lp);
    auto b2 = pfstar_norm_bounds(f, ip.p2, opt.lp);
    auto b3 = pfstar_norm_bounds(f, ip.p3, opt.lp);
    auto r = interpolation_from_brackets(b1, b2, b3, ip, opt.tol);
    r.group = f.group().name();
    r.budget_exhausted = !(b1.complete && b2.complete && b3.complete);
    return r;
}

std::vector<ExperimentReport> growth_chain_grid(const AlgebraElement& f, const GeneratingSet& S,
                                               const std::vector<Exponent>& ps, std::size_t n_max,
                                               const LabOptions& opt) {
    if (n_max < 1)
        throw InvalidInput("growth chain needs n >= 1");
    require_support_in(f, S);
    const Group& G = f.group();

    // membership[n-1] decides x in S^n.
    std::vector<std::function<bool(const GroupElement&)>> membership;
    std::vector<std::size_t> cards;
    auto positions = std::make_shared<absl::flat_hash_map<GroupElement, std::size_t, ElementHash>>();
    std::vector<std::shared_ptr<absl::flat_hash_set<GroupElement, ElementHash>>> levels;
    if (S.contains_identity()) {
        auto seq = product_set_sequence(S, n_max, {opt.policy.max_support, false});
        for (std::size_t i = 0; i < seq.frontier.size(); ++i)
            positions->emplace(seq.frontier[i], i);
        for (std::size_t n = 1; n <= n_max; ++n) {
            std::size_t size = seq.sizes[n - 1];
            cards.push_back(size);
            membership.emplace_back([positions, size](const GroupElement& x) {
                auto it = positions->find(x);
                return it != positions->end() && it->second < size;
            });
        }
    } else {
        for (std::size_t n = 1; n <= n_max; ++n) {
            auto seq = product_set_sequence(S, n, {opt.policy.max_support, false});
            auto set = std::make_shared<absl::flat_hash_set<GroupElement, ElementHash>>(seq.frontier.begin(),
                                                                                        seq.frontier.end());
            cards.push_back(seq.sizes.back());
            membership.emplace_back([set](const GroupElement& x) { return set->contains(x); });
        }
    }

    std::vector<AlgebraElement> powers{AlgebraElement::identity(G)};
    for (std::size_t k = 1; k <= n_max; ++k)
        powers.push_back(convolve(powers.back(), f, opt.policy));
    const double u2f = l2_norm_upper(f, opt.lp.u2_doublings, opt.lp.policy).values.back();

    std::vector<ExperimentReport> out;
    for (const auto& p : ps) {
        const Exponent q = p.conjugate();
        const double lp_f = p_norm(f, p);
        for (std::size_t n = 1; n <= n_max; ++n) {
            const AlgebraElement& fn1 = powers[n - 1];
            const AlgebraElement& fn = powers[n];
            ExperimentReport r;
            r.kind = "growth_chain";
            r.group = G.name();
            r.tolerance = opt.tol;
            r.inputs["p"] = exponent_label(p);
            r.inputs["n"] = n;
            r.inputs["S_size"] = S.size();
            if (!S.contains_identity())
                r.notes.push_back("e is not in S; product sets are not nested");

            bool contained = std::all_of(fn.terms().begin(), fn.terms().end(),
                                         [&](const AlgebraElement::Term& t) { return membership[n - 1](t.first); });
            r.details["support_in_Sn"] = contained;
            if (!contained)
                r.fail("supp f^n is not contained in S^n");

            const double card = static_cast<double>(cards[n - 1]);
            const double card_pow = q.is_infinite() ? 1.0 : std::pow(card, q.reciprocal().value());
            const double l1_fn = p_norm(fn, 1.0);
            const double lp_fn = p_norm(fn, p);

            LpOptions lo;
            lo.radius = 0;
            lo.power_iters = 0;
            lo.u2_doublings = 0;
            lo.policy = opt.policy;
            lo.u2_bound = std::pow(u2f, static_cast<double>(n - 1));
            lo.test_vectors = {f};
            auto pf = pfstar_norm_bounds(fn1, p, lo);

            r.add(Quantity::exact_value("||f^n||_1", l1_fn, "exact convolution power"));
            r.add(Quantity::exact_value("||f^n||_p", lp_fn, "exact convolution power"));
            r.add(Quantity::exact_value("||f||_p", lp_f, "exact"));
            r.add(Quantity::exact_value("|S^n|", card, "product-set enumeration"));
            r.add(Quantity::exact_value("||f^n||_p |S^n|^(1/q)", lp_fn * card_pow, "Hoelder on S^n"));
            r.add(Quantity::from_estimate("pf(f^(n-1))", pf));
            r.add(Quantity::bracket("pf(f^(n-1)) ||f||_p", pf.lower * lp_f, pf.upper * lp_f,
                                    "bracket times exact"));
            r.add(Quantity::bracket("pf(f^(n-1)) ||f||_p |S^n|^(1/q)", pf.lower * lp_f * card_pow,
                                    pf.upper * lp_f * card_pow, "bracket times exact"));

            r.compare("||f^n||_1", "||f^n||_p |S^n|^(1/q)", false, "Hoelder");
            r.compare("||f^n||_p", "pf(f^(n-1)) ||f||_p", false, "operator norm");
            r.compare("||f^n||_1", "pf(f^(n-1)) ||f||_p |S^n|^(1/q)", false, "chain");
            r.finalize();
            out.push_back(std::move(r));
        }
    }
    return out;
}

ExperimentReport check_growth_chain(const AlgebraElement& f, const GeneratingSet& S, const Exponent& p,
                                    std::size_t n, const LabOptions& opt) {
    if (n < 1)
        throw InvalidInput("growth chain needs n >= 1");
    return std::move(growth_chain_grid(f, S, {p}, n, opt).back());
}

ExperimentReport check_spectral_growth_bound(const AlgebraElement& f, const GeneratingSet& S, const Exponent& q,
                                             const LabOptions& opt) {
    if (!f.is_hermitian())
        throw InvalidInput("spectral growth bound needs a Hermitian element");
    require_support_in(f, S);
    ExperimentReport r;
    r.kind = "spectral_growth";
    r.group = f.group().name();
    r.tolerance = opt.tol;
    r.inputs["q"] = q.str();

    const Exponent p = q.conjugate();
    auto oracle = coinciding_radius_oracle(f);
    auto l1 = l1_spectral_radius(f, opt.max_doublings, opt.policy);
    auto nu = nu_bracket(S, opt, r);
    auto pfr = pfstar_radius_bracket(f, p, opt.max_doublings, opt.radius, opt.max_moments, opt.policy);

    Quantity ql1 = Quantity::from_estimate("r_l1(f)", l1);
    Quantity qpf = Quantity::from_estimate("r_pf(f)", pfr);
    tighten(ql1, oracle);
    tighten(qpf, oracle);
    Quantity qnu = Quantity::from_estimate("nu_S", nu);
    r.add(ql1);
    r.add(qpf);
    r.add(qnu);

    auto rhs_at = [&](double qq, bool upper) {
        double e = std::isinf(qq) ? 0.0 : 1.0 / qq;
        return upper ? qpf.upper * std::pow(qnu.upper, e) : qpf.lower * std::pow(qnu.lower, e);
    };
    const double qv = q.value();
    r.add(Quantity::bracket("r_pf(f) nu_S^(1/q)", rhs_at(qv, false), rhs_at(qv, true), "product of brackets"));
    r.compare("r_l1(f)", "r_pf(f) nu_S^(1/q)");

    nlohmann::json sweep = nlohmann::json::array();
    double prev_upper = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double prev_est_margin = std::numeric_limits<double>::infinity();
    bool shrinking = true;
    for (double qq : {4.0, 8.0, 16.0, 32.0}) {
        double up = rhs_at(qq, true), lo = rhs_at(qq, false);
        monotone = monotone && up <= prev_upper * (1 + 1e-15);
        prev_upper = up;
        nlohmann::json row = {{"q", qq}, {"rhs_lower", lo}, {"rhs_upper", up}, {"margin", lo - ql1.upper}};
        if (l1.estimate && pfr.estimate && nu.estimate) {
            double em = *pfr.estimate * std::pow(*nu.estimate, 1.0 / qq) - *l1.estimate;
            row["estimate_margin"] = em;
            shrinking = shrinking && em <= prev_est_margin + 1e-12;
            prev_est_margin = em;
        }
        sweep.push_back(row);
    }
    r.details["q_sweep"] = sweep;
    r.details["rhs_upper_nonincreasing_in_q"] = monotone;
    r.details["estimate_margin_shrinks_with_q"] = shrinking;
    r.budget_exhausted = !(l1.complete && pfr.complete);
    r.finalize();
    return r;
}

namespace {

Quantity cstar_radius_bracket(const AlgebraElement& h, const LabOptions& opt, std::optional<double>* estimate,
                              bool* complete) {
    auto mom = cstar_radius_hermitian(h, opt.max_moments, opt.policy);
    Quantity q = Quantity::from_estimate("r_cstar(h_S)", mom);
    if (opt.radius > 0) {
        auto tr = cstar_norm_lower_truncation(h, opt.radius, opt.truncation);
        if (tr.value > q.lower) {
            q.lower = tr.value;
            q.lower_certificate.push(-static_cast<double>(tr.radius), tr.value);
            q.method += "; l2 truncation radius " + std::to_string(tr.radius);
        }
    }
    tighten(q, coinciding_radius_oracle(h));
    if (estimate)
        *estimate = mom.estimate;
    if (complete)
        *complete = mom.complete;
    return q;
}

}  // namespace

ExperimentReport check_kesten_growth_lemma(const GeneratingSet& S, const Exponent& p, const LabOptions& opt) {
    if (!S.symmetric())
        throw InvalidInput("Kesten growth lemma needs a symmetric S");
    ExperimentReport r;
    r.kind = "kesten_lemma";
    r.group = S.group().name();
    r.tolerance = opt.tol;
    r.inputs["p"] = p.str();
    r.inputs["S_size"] = S.size();
    const Exponent q = p.conjugate();
    auto h = AlgebraElement::normalized_indicator(S);
    auto nu = nu_bracket(S, opt, r);
    bool complete = true;
    Quantity rq = cstar_radius_bracket(h, opt, nullptr, &complete);
    double e = q.is_infinite() ? 0.0 : q.reciprocal().value();
    r.add(Quantity::from_estimate("nu_S", nu));
    r.add(Quantity::bracket("nu_S^(-1/q)", std::pow(nu.upper, -e), std::pow(nu.lower, -e), "from nu_S bracket"));
    r.add(rq);
    r.compare("nu_S^(-1/q)", "r_cstar(h_S)");
    r.budget_exhausted = !complete;
    r.finalize();
    return r;
}

ExperimentReport kesten_amenability_probe(const GeneratingSet& S, const LabOptions& opt) {
    if (!S.symmetric())
        throw InvalidInput("Kesten probe needs a symmetric S");
    ExperimentReport r;
    r.kind = "kesten";
    r.group = S.group().name();
    r.tolerance = opt.tol;
    r.inputs["S_size"] = S.size();
    r.inputs["contains_identity"] = S.contains_identity();
    r.inputs["kesten_tol"] = opt.kesten_tol;
    auto h = AlgebraElement::normalized_indicator(S);
    std::optional<double> est;
    bool complete = true;
    Quantity rq = cstar_radius_bracket(h, opt, &est, &complete);
    r.add(rq);
    r.add(Quantity::exact_value("||h_S||_1", p_norm(h, 1.0), "exact"));
    r.compare("r_cstar(h_S)", "||h_S||_1");

    std::string cls = "inconclusive";
    if (rq.lower >= 1.0 - opt.kesten_tol)
        cls = "amenable-consistent";
    else if (rq.upper < 1.0 - opt.kesten_tol)
        cls = "non-amenable-certified";
    r.details["classification"] = cls;
    if (est) {
        r.details["extrapolated_radius"] = *est;
        r.details["extrapolation_flag"] = *est < 1.0 - opt.kesten_tol ? "non-amenable" : "amenable";
    }
    r.budget_exhausted = !complete;
    r.finalize();
    return r;
}

SpectralEstimate circle_sup(const WitnessCoefficients& c, double tol) {
    TrigPolynomial P;
    P.dim = 1;
    P.terms = {{{0}, c.a0}, {{1}, c.a1}, {{2}, c.a2}};
    SupOptions o;
    o.tol = tol;
    o.initial_grid = 4096;
    return trig_poly_sup(P, o);
}

ExperimentReport jenkins_witness(const Group& g, const GroupElement& s, const GroupElement& t,
                                 const WitnessCoefficients& coeffs, std::size_t n_max, const LabOptions& opt,
                                 std::size_t g_moments) {
    for (Complex a : {coeffs.a0, coeffs.a1, coeffs.a2})
        if (std::abs(std::abs(a) - 1.0 / 3.0) > 1e-12)
            throw InvalidInput("witness coefficients must have modulus 1/3");
    auto cs = circle_sup(coeffs);
    if (cs.upper >= 1.0)
        throw InvalidInput("witness coefficients: circle sup is not certified below 1");
    if (!verify_free_semigroup(g, s, t, n_max, opt.policy.max_support))
        throw InvalidInput("s and t do not generate a free semigroup up to depth " + std::to_string(n_max));

    ExperimentReport r;
    r.kind = "jenkins";
    r.group = g.name();
    r.tolerance = opt.tol;
    r.inputs["s"] = g.format(s);
    r.inputs["t"] = g.format(t);
    r.inputs["n_max"] = n_max;
    auto cj = [](Complex z) { return nlohmann::json::array({z.real(), z.imag()}); };
    r.inputs["coefficients"] = {cj(coeffs.a0), cj(coeffs.a1), cj(coeffs.a2)};

    GroupElement st = g.multiply(s, t);
    AlgebraElement f(g, {{t, coeffs.a0}, {st, coeffs.a1}, {g.multiply(s, st), coeffs.a2}});

    std::vector<double> sizes, norms;
    bool exact = true;
    AlgebraElement fn = f;
    double expected_size = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (n > 1)
            fn = convolve(fn, f, opt.policy);
        expected_size *= 3.0;
        double modulus = std::pow(3.0, -static_cast<double>(n));
        bool uniform = std::all_of(fn.terms().begin(), fn.terms().end(), [&](const AlgebraElement::Term& x) {
            return std::abs(std::abs(x.second) - modulus) <= 1e-12 * modulus;
        });
        sizes.push_back(static_cast<double>(fn.size()));
        norms.push_back(p_norm(fn, 1.0));
        if (static_cast<double>(fn.size()) != expected_size || !uniform) {
            exact = false;
            r.fail("f^" + std::to_string(n) + " has " + std::to_string(fn.size()) +
                   " terms or non-uniform moduli; expected 3^n terms of modulus 3^-n");
            break;
        }
    }
    r.details["support_sizes"] = sizes;
    r.details["l1_norms"] = norms;

    r.add(Quantity::exact_value("r_l1(f)", exact ? 1.0 : norms.back(),
                                "||f^n||_1 = 3^n * 3^-n from distinct support, n <= n_max"));
    Quantity qcs = Quantity::from_estimate("circle_sup", cs);
    r.add(qcs);
    r.add(Quantity::bracket("circle_sup^2", cs.lower * cs.lower, cs.upper * cs.upper, "square of bracket"));

    AlgebraElement gg = convolve(involute(f), f, opt.policy);
    auto mom = cstar_radius_hermitian(gg, g_moments, opt.policy);
    Quantity qn = Quantity::from_estimate("||lambda(f)||^2", mom);
    if (cs.upper * cs.upper < qn.upper) {
        qn.upper = cs.upper * cs.upper;
        qn.upper_certificate.push(-1, qn.upper);
        qn.method += "; unitary calculus bound sup|p|^2";
    }
    r.add(qn);
    r.add(Quantity::bracket("r_cstar(f)", 0.0, cs.upper, "r <= ||lambda(f)|| <= sup over the circle"));
    r.details["g_moment_lower_bounds"] = mom.lower_certificate.values;
    r.details["gap"] = 1.0 - cs.upper;
    r.details["g_moments_completed"] = mom.lower_certificate.values.size();
    // Each computed moment is already a valid lower bound, so a short sequence is not an abort.
    if (!mom.complete) {
        r.notes.push_back("g moments stopped at n = " + std::to_string(mom.lower_certificate.values.size()) +
                          " of " + std::to_string(g_moments));
    }

    r.compare("||lambda(f)||^2", "circle_sup^2", false, "moment bounds stay below sup^2");
    r.compare("r_cstar(f)", "r_l1(f)", true, "spectral gap", ComparisonMode::Certified);
    r.finalize();
    return r;
}

ExperimentReport check_rd_bound(const AlgebraElement& f, double alpha, double C, const LabOptions& opt) {
    const Group& G = f.group();
    ExperimentReport r;
    r.kind = "rd_bound";
    r.group = G.name();
    r.tolerance = opt.tol;
    r.inputs["alpha"] = alpha;
    r.inputs["C"] = C;

    CompensatedSum s;
    for (const auto& [x, c] : f.terms()) {
        double w = std::pow(1.0 + static_cast<double>(G.word_length(x)), alpha);
        s.add(w * w * std::norm(c));
    }
    double weighted = std::sqrt(s.value());

    double lower = p_norm(f, 2.0);
    Certificate lc{"||f||_2, then l2 truncation", {0}, {lower}};
    if (opt.radius > 0 && !f.empty()) {
        auto tr = cstar_norm_lower_truncation(f, opt.radius, opt.truncation);
        lower = std::max(lower, tr.value);
        lc.push(static_cast<double>(tr.radius), lower);
    }
    Certificate uc = l2_norm_upper(f, opt.lp.u2_doublings, opt.lp.policy);
    Quantity lhs = Quantity::bracket("||lambda(f)||", lower, uc.values.back(), "truncation / l1 doubling");
    lhs.lower_certificate = lc;
    lhs.upper_certificate = uc;
    r.add(lhs);
    r.add(Quantity::exact_value("C ||f||_(2,omega)", C * weighted, "weighted l2 norm, omega = (1+|s|)^alpha"));
    r.compare("||lambda(f)||", "C ||f||_(2,omega)");
    r.details["lower_ratio"] = weighted > 0 ? lower / (C * weighted) : 0.0;
    r.finalize();
    return r;
}

std::vector<GroupElement> element_pool(const Group& g, std::size_t radius, std::size_t max_elements) {
    if (radius == 0)
        return {g.identity()};
    auto seq = product_set_sequence(GeneratingSet::standard(g, true), radius, {max_elements, true});
    return seq.frontier;
}

AlgebraElement random_hermitian(const Group& g, const std::vector<GroupElement>& pool, std::size_t terms,
                                std::mt19937_64& rng, bool real) {
    if (pool.empty())
        return AlgebraElement(g);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<AlgebraElement::Term> t;
    for (std::size_t i = 0; i < terms; ++i) {
        const auto& x = pool[pick(rng)];
        double re = coef(rng);
        double im = real ? 0.0 : coef(rng);
        auto xi = g.inverse(x);
        if (xi == x) {
            t.emplace_back(x, Complex(2.0 * re, 0.0));
        } else {
            t.emplace_back(x, Complex(re, im));
            t.emplace_back(xi, Complex(re, -im));
        }
    }
    AlgebraElement f(g, std::move(t));
    double n = p_norm(f, 1.0);
    if (n > 0.0)
        f *= 1.0 / n;
    return f;
}

ExperimentReport rd_falsifier_search(const Group& g, double alpha, double C, std::size_t sphere_radius,
                                     std::size_t samples, std::uint64_t seed, const LabOptions& opt) {
    auto ball = element_pool(g, sphere_radius);
    std::vector<GroupElement> sphere;
    for (const auto& x : ball)
        if (static_cast<std::size_t>(g.word_length(x)) == sphere_radius)
            sphere.push_back(x);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, sphere.empty() ? 0 : sphere.size() - 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);

    ExperimentReport agg;
    agg.kind = "rd_bound";
    agg.group = g.name();
    agg.tolerance = opt.tol;
    agg.inputs["alpha"] = alpha;
    agg.inputs["C"] = C;
    agg.inputs["sphere_radius"] = sphere_radius;
    agg.inputs["samples"] = samples;
    agg.inputs["seed"] = seed;
    double worst = -1.0;
    std::size_t worst_index = 0;
    nlohmann::json ratios = nlohmann::json::array();
    for (std::size_t i = 0; i < samples && !sphere.empty(); ++i) {
        std::vector<AlgebraElement::Term> t;
        std::size_t k = std::min<std::size_t>(sphere.size(), 8);
        for (std::size_t j = 0; j < k; ++j)
            t.emplace_back(sphere[pick(rng)], Complex(coef(rng), coef(rng)));
        AlgebraElement f(g, std::move(t));
        auto r = check_rd_bound(f, alpha, C, opt);
        double ratio = r.details["lower_ratio"].get<double>();
        ratios.push_back(ratio);
        std::string tag = "sample" + std::to_string(i) + ".";
        for (auto q : r.quantities) {
            q.name = tag + q.name;
            agg.add(std::move(q));
        }
        agg.compare(tag + "||lambda(f)||", tag + "C ||f||_(2,omega)");
        if (ratio > worst) {
            worst = ratio;
            worst_index = i;
        }
    }
    agg.details["lower_ratios"] = ratios;
    agg.details["worst_ratio"] = worst;
    agg.details["worst_sample"] = worst_index;
    agg.finalize();
    return agg;
}

}  // namespace specrad
