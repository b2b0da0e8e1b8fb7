#include "specrad/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <absl/container/flat_hash_map.h>

#include "specrad/errors.hpp"
#include "specrad/growth.hpp"

namespace specrad {
namespace {

double l1_upper(const AlgebraElement& g) { return p_norm(g, 1.0) + g.dropped_mass(); }

double l2_lower(const AlgebraElement& g) { return std::max(0.0, p_norm(g, 2.0) - g.dropped_mass()); }

double root(double x, double n) { return x <= 0.0 ? 0.0 : std::pow(x, 1.0 / n); }

double running_extreme(const Certificate& c, bool take_max) {
    if (c.empty())
        return take_max ? 0.0 : std::numeric_limits<double>::infinity();
    return take_max ? *std::max_element(c.values.begin(), c.values.end())
                    : *std::min_element(c.values.begin(), c.values.end());
}

/// supp f, supp f* and e; e first.
GeneratingSet local_generators(const AlgebraElement& f) {
    const Group& G = f.group();
    std::vector<GroupElement> v{G.identity()};
    for (const auto& [x, c] : f.terms()) {
        v.push_back(x);
        v.push_back(G.inverse(x));
    }
    return GeneratingSet(G, std::move(v));
}

}  // namespace

double richardson(double previous, double last) { return previous > 0.0 ? last * last / previous : last; }

SpectralEstimate l1_spectral_radius(const AlgebraElement& f, std::size_t max_doublings,
                                    const TruncationPolicy& policy) {
    SpectralEstimate e;
    e.target = Target::L1Radius;
    e.method = "repeated squaring";
    e.upper_certificate.label = "||f^(2^k)||_1^(2^-k)";
    const bool herm = f.is_hermitian();
    e.lower_certificate.label = herm ? "||f^(2^k)||_2^(2^-k) (trace moments)" : "trivial";

    AlgebraElement g = f;
    for (std::size_t k = 0;; ++k) {
        double n = std::ldexp(1.0, static_cast<int>(k));
        e.upper_certificate.push(n, root(l1_upper(g), n));
        if (herm)
            e.lower_certificate.push(n, root(l2_lower(g), n));
        if (k == max_doublings)
            break;
        try {
            g = convolve(g, g, policy);
        } catch (const BudgetExceeded&) {
            e.complete = false;
            break;
        }
    }
    if (!herm)
        e.lower_certificate.push(0, 0.0);
    e.upper = running_extreme(e.upper_certificate, false);
    e.lower = running_extreme(e.lower_certificate, true);
    const auto& u = e.upper_certificate.values;
    e.estimate = u.size() >= 2 ? richardson(u[u.size() - 2], u.back()) : u.back();
    e.estimate_label = "Richardson c_k^2/c_(k-1)";
    e.diagnostics["doublings_completed"] = {static_cast<double>(u.size() - 1)};
    round_outward(e);
    return e;
}

std::optional<MomentFit> fit_moments(const std::vector<double>& moments) {
    const std::size_t N = moments.size();
    if (N < 3)
        return std::nullopt;
    std::size_t k = std::max<std::size_t>(3, N / 3);
    k = std::min(k, N);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(k), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t idx = N - k + i;
        double n = static_cast<double>(idx + 1);
        if (!(moments[idx] > 0.0))
            return std::nullopt;
        auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        X(r, 1) = 2.0 * n;
        X(r, 2) = -std::log(n);
        y(r) = std::log(moments[idx]);
    }
    Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
    MomentFit fit;
    fit.log_c = c(0);
    fit.rho = std::exp(c(1));
    fit.gamma = c(2);
    fit.points = k;
    return fit;
}

SpectralEstimate cstar_radius_hermitian(const AlgebraElement& f, std::size_t max_n, const TruncationPolicy& policy) {
    if (!f.is_hermitian(1e-12))
        throw InvalidInput("cstar_radius_hermitian needs a Hermitian element");
    if (max_n < 1)
        throw InvalidInput("cstar_radius_hermitian needs max_n >= 1");
    SpectralEstimate e;
    e.target = Target::CstarRadius;
    e.method = "trace moments";
    e.lower_certificate.label = "m_2n^(1/2n), m_2n = ||f^n||_2^2";
    e.upper_certificate.label = "||f^(2^k)||_1^(2^-k)";

    std::vector<double> moments;
    AlgebraElement g = f;
    for (std::size_t n = 1; n <= max_n; ++n) {
        if (n > 1) {
            try {
                g = convolve(g, f, policy);
            } catch (const BudgetExceeded&) {
                e.complete = false;
                break;
            }
        }
        double l2 = l2_lower(g);
        double m = l2 * l2;
        moments.push_back(m);
        auto dn = static_cast<double>(n);
        e.lower_certificate.push(2.0 * dn, root(m, 2.0 * dn));
        if ((n & (n - 1)) == 0)
            e.upper_certificate.push(dn, root(l1_upper(g), dn));
    }
    e.lower = running_extreme(e.lower_certificate, true);
    e.upper = running_extreme(e.upper_certificate, false);
    e.diagnostics["moments"] = moments;
    if (auto fit = fit_moments(moments)) {
        e.estimate = fit->rho;
        e.estimate_label = "fit m_2n ~ C rho^2n n^-gamma over last " + std::to_string(fit->points) + " moments";
        e.diagnostics["fit_gamma"] = {fit->gamma};
        e.diagnostics["fit_log_c"] = {fit->log_c};
    }
    round_outward(e);
    return e;
}

namespace {

/// Column-compressed matrix of lambda(f) from l^2(ball) into l^2(ball * supp f).
struct BallOperator {
    std::vector<GroupElement> ball;
    std::vector<std::size_t> prefix;  // prefix[r] = |ball of radius r|
    std::vector<std::size_t> col_ptr{0};
    std::vector<std::size_t> row;
    std::vector<Complex> val;
    std::size_t rows = 0;

    BallOperator(const AlgebraElement& f, std::size_t radius, std::size_t max_ball) {
        const Group& G = f.group();
        if (radius == 0) {
            ball = {G.identity()};
            prefix = {1};
        } else {
            auto seq = product_set_sequence(local_generators(f), radius, {max_ball, true});
            ball = std::move(seq.frontier);
            prefix.push_back(1);
            for (auto s : seq.sizes)
                prefix.push_back(s);
        }
        absl::flat_hash_map<GroupElement, std::size_t, ElementHash> rows_of;
        rows_of.reserve(ball.size() * 2);
        for (const auto& x : ball) {
            for (const auto& [s, c] : f.terms()) {
                auto [it, inserted] = rows_of.try_emplace(G.multiply(s, x), rows_of.size());
                row.push_back(it->second);
                val.push_back(c);
            }
            col_ptr.push_back(row.size());
        }
        rows = rows_of.size();
    }

    std::size_t radius() const { return prefix.size() - 1; }

    void forward(const std::vector<Complex>& v, std::vector<Complex>& w) const {
        w.assign(rows, 0.0);
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] == Complex(0.0, 0.0))
                continue;
            for (std::size_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k)
                w[row[k]] += val[k] * v[j];
        }
    }

    void adjoint(const std::vector<Complex>& w, std::vector<Complex>& u) const {
        for (std::size_t j = 0; j < u.size(); ++j) {
            Complex s = 0.0;
            for (std::size_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k)
                s += std::conj(val[k]) * w[row[k]];
            u[j] = s;
        }
    }
};

double norm2(const std::vector<Complex>& v) {
    CompensatedSum s;
    for (auto z : v)
        s.add(std::norm(z));
    return s.value();
}

/// Power iteration on the compression to the first n ball elements; `v` is
/// the (normalised on return) start vector. Returns the largest Rayleigh
/// quotient seen.
double compressed_power_iteration(const BallOperator& M, std::vector<Complex>& v, const TruncationOptions& opt,
                                  TruncationResult& out) {
    std::vector<Complex> w, u(v.size());
    double nv = std::sqrt(norm2(v));
    for (auto& z : v)
        z /= nv;
    double best = 0.0, prev = -1.0;
    bool restarted = false;
    out.converged = false;
    std::size_t it = 0;
    while (it < opt.max_iters) {
        ++it;
        M.forward(v, w);
        double rq = norm2(w);
        best = std::max(best, rq);
        if (rq == 0.0 && !restarted) {
            restarted = true;
            std::fill(v.begin(), v.end(), Complex(1.0 / std::sqrt(static_cast<double>(v.size()))));
            continue;
        }
        M.adjoint(w, u);
        double nu = std::sqrt(norm2(u));
        if (nu == 0.0) {
            out.converged = true;
            break;
        }
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = u[j] / nu;
        if (std::abs(rq - prev) <= opt.tol * rq) {
            out.converged = true;
            break;
        }
        prev = rq;
    }
    out.iterations = it;
    return best;
}

}  // namespace

TruncationResult cstar_norm_lower_truncation(const AlgebraElement& f, std::size_t radius,
                                             const TruncationOptions& opt) {
    TruncationResult r;
    if (f.empty())
        return r;
    BallOperator M(f, radius, opt.max_ball);
    std::vector<Complex> v(M.ball.size(), 0.0);
    v[0] = 1.0;
    double best = compressed_power_iteration(M, v, opt, r);
    // delta_e never leaves the even part when f lives on odd lengths, so the
    // first sphere gets its own run.
    if (M.prefix.size() > 1 && M.prefix[1] > 1) {
        std::fill(v.begin(), v.end(), Complex(0.0, 0.0));
        std::fill(v.begin() + 1, v.begin() + static_cast<std::ptrdiff_t>(M.prefix[1]), Complex(1.0, 0.0));
        TruncationResult odd;
        double b = compressed_power_iteration(M, v, opt, odd);
        r.iterations += odd.iterations;
        r.converged = r.converged && odd.converged;
        best = std::max(best, b);
    }
    r.value = std::sqrt(best) * (1.0 - kOutwardSlack);
    r.radius = M.radius();
    r.ball_size = M.ball.size();
    return r;
}

std::vector<TruncationResult> cstar_norm_truncation_profile(const AlgebraElement& f, std::size_t max_radius,
                                                            const TruncationOptions& opt) {
    std::vector<TruncationResult> out;
    if (f.empty()) {
        out.resize(max_radius + 1);
        return out;
    }
    BallOperator M(f, max_radius, opt.max_ball);
    std::vector<Complex> v{1.0};
    double carried = 0.0;
    for (std::size_t r = 0; r <= M.radius(); ++r) {
        v.resize(M.prefix[r], 0.0);
        TruncationResult res;
        double best = compressed_power_iteration(M, v, opt, res);
        carried = std::max(carried, std::sqrt(best) * (1.0 - kOutwardSlack));
        res.value = carried;
        res.radius = r;
        res.ball_size = M.prefix[r];
        out.push_back(res);
    }
    return out;
}

Certificate l2_norm_upper(const AlgebraElement& f, std::size_t doublings, const TruncationPolicy& policy) {
    Certificate c;
    double best = l1_upper(f);
    c.push(0, best);
    if (f.empty())
        return c;
    if (f.is_hermitian()) {
        c.label = "||f||_1, ||f^(2^k)||_1^(2^-k)";
        AlgebraElement g = f;
        for (std::size_t k = 1; k <= doublings; ++k) {
            try {
                g = convolve(g, g, policy);
            } catch (const BudgetExceeded&) {
                break;
            }
            best = std::min(best, root(l1_upper(g), std::ldexp(1.0, static_cast<int>(k))));
            c.push(static_cast<double>(k), best);
        }
        return c;
    }
    c.label = "||f||_1, ||(f* f)^(2^k)||_1^(2^-(k+1))";
    AlgebraElement h(f.group());
    try {
        h = convolve(involute(f), f, policy);
    } catch (const BudgetExceeded&) {
        return c;
    }
    for (std::size_t k = 0; k < doublings; ++k) {
        if (k > 0) {
            try {
                h = convolve(h, h, policy);
            } catch (const BudgetExceeded&) {
                break;
            }
        }
        best = std::min(best, std::sqrt(root(l1_upper(h), std::ldexp(1.0, static_cast<int>(k)))));
        c.push(static_cast<double>(k + 1), best);
    }
    return c;
}

namespace {

Complex psi(Complex z, double p) {
    double m = std::abs(z);
    if (m == 0.0)
        return 0.0;
    return std::pow(m, p - 1.0) * (z / m);
}

AlgebraElement map_coefficients(const AlgebraElement& v, double p, double prune_rel) {
    double mx = 0.0;
    for (const auto& t : v.terms())
        mx = std::max(mx, std::abs(t.second));
    std::vector<AlgebraElement::Term> out;
    out.reserve(v.size());
    for (const auto& [x, c] : v.terms()) {
        if (std::abs(c) <= prune_rel * mx)
            continue;
        Complex z = psi(c, p);
        if (z != Complex(0.0, 0.0))
            out.emplace_back(x, z);
    }
    return AlgebraElement::from_sorted(v.group(), std::move(out));
}

}  // namespace

SpectralEstimate lp_opnorm_bounds(const AlgebraElement& f, const Exponent& p, const LpOptions& opt) {
    SpectralEstimate e;
    e.target = Target::OpNormP;
    e.method = "Riesz-Thorin upper, test-vector lower";
    const double pv = p.value();
    const double n1 = l1_upper(f);
    const double ex = p.is_infinite() ? 1.0 : std::abs((Rational{2, 1} * p.reciprocal() - Rational{1, 1}).value());

    e.upper_certificate.label = "||f||_1^|2/p-1| U_2^(1-|2/p-1|)";
    if (ex == 1.0 || f.empty()) {
        e.upper_certificate.push(0, n1);
    } else {
        Certificate u2 = l2_norm_upper(f, opt.u2_doublings, opt.policy);
        if (opt.u2_bound)
            u2.push(-1, std::min(u2.values.back(), *opt.u2_bound));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < u2.values.size(); ++i) {
            best = std::min(best, std::pow(n1, ex) * std::pow(u2.values[i], 1.0 - ex));
            e.upper_certificate.push(u2.index[i], best);
        }
        e.diagnostics["u2"] = u2.values;
    }
    e.upper = running_extreme(e.upper_certificate, false);

    e.lower_certificate.label = "max ||f*v||_p/||v||_p over test vectors";
    double best = 0.0;
    std::vector<double> sources;
    auto record = [&](double source, double ratio) {
        if (std::isfinite(ratio) && ratio > best)
            best = ratio;
        e.lower_certificate.push(source, best);
    };
    auto ratio_of = [&](const AlgebraElement& v) -> double {
        double nv = p_norm(v, pv);
        if (nv == 0.0)
            return 0.0;
        return p_norm(convolve(f, v, opt.policy), pv) / nv;
    };

    if (opt.upper_only || f.empty()) {
        record(0, f.empty() ? 0.0 : p_norm(f, pv));
        e.lower = best;
        round_outward(e);
        return e;
    }

    const Group& G = f.group();
    // Source tags: 0 delta_e, 1 balls, 2 supplied vectors, 3 power method on
    // f, 4 ascent on |f|, 5 l^2 truncation.
    record(0, p_norm(f, pv));

    std::vector<GroupElement> ball;
    std::vector<std::size_t> sizes;
    if (opt.radius > 0) {
        auto seq = product_set_sequence(local_generators(f), opt.radius, {opt.ball_budget, true});
        ball = std::move(seq.frontier);
        sizes = seq.sizes;
        for (auto s : sizes) {
            std::vector<GroupElement> prefix(ball.begin(), ball.begin() + static_cast<std::ptrdiff_t>(s));
            try {
                record(1, ratio_of(AlgebraElement::indicator(G, prefix)));
            } catch (const BudgetExceeded&) {
                break;
            }
        }
    }
    for (const auto& v : opt.test_vectors) {
        try {
            record(2, ratio_of(v));
        } catch (const BudgetExceeded&) {
        }
    }

    const bool interior = !p.is_infinite() && pv > 1.0;
    if (interior && opt.power_iters > 0) {
        const double qv = p.conjugate().value();
        AlgebraElement start = ball.empty() ? AlgebraElement::identity(G) : AlgebraElement::indicator(G, ball);
        auto run = [&](const AlgebraElement& A, double tag) {
            AlgebraElement Aadj = involute(A);
            AlgebraElement x = start;
            for (std::size_t it = 0; it < opt.power_iters; ++it) {
                try {
                    AlgebraElement y = convolve(A, x, opt.policy);
                    AlgebraElement z = convolve(Aadj, map_coefficients(y, pv, 0.0), opt.policy);
                    x = map_coefficients(z, qv, 1e-13);
                    if (x.empty() || x.size() > opt.vector_budget)
                        break;
                    record(tag, ratio_of(x));
                } catch (const BudgetExceeded&) {
                    break;
                }
            }
        };
        run(f, 3);
        AlgebraElement af = modulus(f);
        bool nonnegative = std::all_of(f.terms().begin(), f.terms().end(), [](const AlgebraElement::Term& t) {
            return t.second.imag() == 0.0 && t.second.real() >= 0.0;
        });
        if (!nonnegative)
            run(af, 4);
    }

    if (pv == 2.0 && opt.truncation_radius > 0) {
        TruncationOptions to;
        to.max_ball = opt.ball_budget * 10;
        record(5, cstar_norm_lower_truncation(f, opt.truncation_radius, to).value);
    }

    e.lower = best;
    round_outward(e);
    return e;
}

SpectralEstimate pfstar_norm_bounds(const AlgebraElement& f, const Exponent& p, const LpOptions& opt) {
    SpectralEstimate a = lp_opnorm_bounds(f, p, opt);
    a.target = Target::PfStarNorm;
    a.method = "max of lambda_p and lambda_q brackets";
    if (f.is_hermitian() || p == p.conjugate())
        return a;
    LpOptions o2 = opt;
    o2.test_vectors.clear();
    SpectralEstimate b = lp_opnorm_bounds(f, p.conjugate(), o2);
    double best = a.lower;
    for (std::size_t i = 0; i < b.lower_certificate.values.size(); ++i) {
        best = std::max(best, b.lower_certificate.values[i]);
        a.lower_certificate.push(100 + b.lower_certificate.index[i], best);
    }
    a.lower = std::max(a.lower, b.lower);
    if (b.upper > a.upper) {
        a.upper = b.upper;
        a.upper_certificate = b.upper_certificate;
    }
    return a;
}

SpectralEstimate pfstar_radius_bracket(const AlgebraElement& f, const Exponent& p, std::size_t max_doublings,
                                       std::size_t radius, std::size_t max_moments, const TruncationPolicy& policy) {
    if (!f.is_hermitian(1e-12))
        throw InvalidInput("pfstar_radius_bracket needs a Hermitian element");
    SpectralEstimate e;
    e.target = Target::PfStarRadius;
    e.method = "moments and truncation below, interpolated l^1 powers above";

    SpectralEstimate mom = cstar_radius_hermitian(f, std::max<std::size_t>(max_moments, 1), policy);
    e.lower_certificate = mom.lower_certificate;
    e.lower_certificate.label = "trace moments, then l^2 truncation";
    double lower = mom.lower;
    if (radius > 0 && !f.empty()) {
        auto tr = cstar_norm_lower_truncation(f, radius);
        lower = std::max(lower, tr.value);
        e.lower_certificate.push(-static_cast<double>(tr.radius), lower);
    }
    e.lower = lower;
    e.estimate = mom.estimate;
    e.estimate_label = mom.estimate_label;
    e.complete = mom.complete;

    // PF*_p(f^n) <= ||f^n||_1^ex U_2(f)^(n(1-ex)) for self-adjoint f, n = 2^k.
    SpectralEstimate l1 = l1_spectral_radius(f, max_doublings, policy);
    const double ex = std::abs((Rational{2, 1} * (p.value() <= 2.0 ? p : p.conjugate()).reciprocal() -
                                Rational{1, 1})
                                   .value());
    const double u2 = running_extreme(l1.upper_certificate, false);
    e.upper_certificate.label = "(||f^(2^k)||_1^ex U_2^(2^k (1-ex)))^(2^-k)";
    double best = std::numeric_limits<double>::infinity();
    for (double ck : l1.upper_certificate.values) {
        best = std::min(best, std::pow(ck, ex) * std::pow(u2, 1.0 - ex));
        e.upper_certificate.push(static_cast<double>(e.upper_certificate.values.size()), best);
    }
    e.upper = best;
    e.complete = e.complete && l1.complete;
    round_outward(e);
    return e;
}

}  // namespace specrad
