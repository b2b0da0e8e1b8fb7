#include "specrad/fourier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <queue>

#include <Eigen/Dense>
#include <absl/container/flat_hash_map.h>

#include "specrad/errors.hpp"
#include "specrad/growth.hpp"

namespace specrad {

Complex TrigPolynomial::operator()(const std::vector<double>& theta) const {
    Complex s = 0.0;
    for (const auto& [m, c] : terms) {
        double phase = 0.0;
        for (std::size_t j = 0; j < dim; ++j)
            phase += static_cast<double>(m[j]) * theta[j];
        s += c * std::polar(1.0, phase);
    }
    return s;
}

namespace {

struct Cell {
    std::vector<double> center;
    double half = 0.0;  // half side length, equal in every direction
    double value = 0.0;
    double bound = 0.0;

    bool operator<(const Cell& o) const { return bound < o.bound; }
};

}  // namespace

SpectralEstimate trig_poly_sup(const TrigPolynomial& P, const SupOptions& opt) {
    SpectralEstimate e;
    e.target = Target::FourierSup;
    e.method = "branch and bound on |P|^2";
    e.lower_certificate.label = "|P(theta)| at evaluated points";
    e.upper_certificate.label = "cell bound G + |grad G| r + M2 r^2/2";

    const std::size_t d = P.dim;
    if (P.terms.empty()) {
        e.lower_certificate.push(0, 0.0);
        e.upper_certificate.push(0, 0.0);
        return e;
    }
    if (d == 0) {
        Complex s = 0.0;
        for (const auto& t : P.terms)
            s += t.second;
        e.lower = e.upper = std::abs(s);
        e.lower_certificate.push(0, e.lower);
        e.upper_certificate.push(0, e.upper);
        return e;
    }

    // M2 = sum_k |g_k| |k|^2 with g the coefficients of |P|^2.
    absl::flat_hash_map<std::vector<std::int64_t>, Complex> g;
    for (const auto& [m, c] : P.terms)
        for (const auto& [m2, c2] : P.terms) {
            std::vector<std::int64_t> k(d);
            for (std::size_t j = 0; j < d; ++j)
                k[j] = m[j] - m2[j];
            g[k] += c * std::conj(c2);
        }
    double M2 = 0.0;
    for (const auto& [k, c] : g) {
        double n2 = 0.0;
        for (auto x : k)
            n2 += static_cast<double>(x) * static_cast<double>(x);
        M2 += std::abs(c) * n2;
    }

    auto eval = [&](Cell& cell) {
        Complex v = 0.0;
        std::vector<Complex> grad(d, 0.0);
        for (const auto& [m, c] : P.terms) {
            double phase = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                phase += static_cast<double>(m[j]) * cell.center[j];
            Complex z = c * std::polar(1.0, phase);
            v += z;
            for (std::size_t j = 0; j < d; ++j)
                grad[j] += Complex(0.0, static_cast<double>(m[j])) * z;
        }
        double G = std::norm(v);
        double gn2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double gj = 2.0 * (std::conj(v) * grad[j]).real();
            gn2 += gj * gj;
        }
        double r = cell.half * std::sqrt(static_cast<double>(d));
        cell.value = G;
        cell.bound = G + std::sqrt(gn2) * r + 0.5 * M2 * r * r;
    };

    const double two_pi = 2.0 * std::numbers::pi;
    auto per_axis = static_cast<std::size_t>(
        std::max(1.0, std::floor(std::pow(static_cast<double>(opt.initial_grid), 1.0 / static_cast<double>(d)))));
    double h0 = two_pi / static_cast<double>(per_axis) / 2.0;

    std::priority_queue<Cell> queue;
    double best = 0.0;
    std::size_t cells = 0;
    std::vector<std::size_t> idx(d, 0);
    while (true) {
        Cell c;
        c.center.resize(d);
        for (std::size_t j = 0; j < d; ++j)
            c.center[j] = (2.0 * static_cast<double>(idx[j]) + 1.0) * h0;
        c.half = h0;
        eval(c);
        best = std::max(best, c.value);
        queue.push(std::move(c));
        ++cells;
        std::size_t j = 0;
        while (j < d && ++idx[j] == per_axis)
            idx[j++] = 0;
        if (j == d)
            break;
    }

    auto width_ok = [&](double top) { return std::sqrt(top) - std::sqrt(best) <= opt.tol; };
    std::size_t step = 0;
    while (!queue.empty() && !width_ok(queue.top().bound) && cells < opt.max_cells) {
        Cell c = queue.top();
        queue.pop();
        double h = c.half / 2.0;
        std::size_t children = std::size_t{1} << d;
        for (std::size_t mask = 0; mask < children; ++mask) {
            Cell ch;
            ch.center = c.center;
            for (std::size_t j = 0; j < d; ++j)
                ch.center[j] += ((mask >> j) & 1U) ? h : -h;
            ch.half = h;
            eval(ch);
            best = std::max(best, ch.value);
            if (ch.bound > best)
                queue.push(std::move(ch));
            ++cells;
        }
        if (++step % 4096 == 0) {
            e.lower_certificate.push(static_cast<double>(cells), std::sqrt(best));
            e.upper_certificate.push(static_cast<double>(cells), std::sqrt(queue.empty() ? best : queue.top().bound));
        }
    }
    double top = queue.empty() ? best : std::max(best, queue.top().bound);
    e.lower = std::sqrt(best);
    e.upper = std::sqrt(top);
    e.complete = width_ok(top);
    e.lower_certificate.push(static_cast<double>(cells), e.lower);
    e.upper_certificate.push(static_cast<double>(cells), e.upper);
    e.diagnostics["cells"] = {static_cast<double>(cells)};
    round_outward(e);
    return e;
}

void walsh_hadamard(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    if (!std::has_single_bit(n))
        throw InvalidInput("Walsh-Hadamard transform needs a power-of-two length");
    for (std::size_t len = 1; len < n; len <<= 1U)
        for (std::size_t i = 0; i < n; i += len << 1U)
            for (std::size_t j = i; j < i + len; ++j) {
                Complex u = a[j], v = a[j + len];
                a[j] = u + v;
                a[j + len] = u - v;
            }
}

SpectralEstimate abelian_spectral_radius_exact(const AlgebraElement& f, const SupOptions& opt) {
    const Group& G = f.group();
    if (G.id().kind == GroupKind::BooleanSum) {
        std::vector<std::int64_t> bits;
        for (const auto& [x, c] : f.terms())
            for (std::size_t w = 0; w < x.word.size(); ++w) {
                auto u = static_cast<std::uint64_t>(x.word[w]);
                while (u) {
                    bits.push_back(static_cast<std::int64_t>(64 * w) + std::countr_zero(u));
                    u &= u - 1;
                }
            }
        std::sort(bits.begin(), bits.end());
        bits.erase(std::unique(bits.begin(), bits.end()), bits.end());
        if (bits.size() > 24)
            throw BudgetExceeded("Walsh-Hadamard block needs more than 24 coordinates", 0);
        std::vector<Complex> a(std::size_t{1} << bits.size(), 0.0);
        for (const auto& [x, c] : f.terms()) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < bits.size(); ++k) {
                auto w = static_cast<std::size_t>(bits[k] / 64);
                if (w < x.word.size() && ((static_cast<std::uint64_t>(x.word[w]) >> (bits[k] % 64)) & 1U))
                    idx |= std::size_t{1} << k;
            }
            a[idx] += c;
        }
        walsh_hadamard(a);
        double mx = 0.0;
        for (auto z : a)
            mx = std::max(mx, std::abs(z));
        SpectralEstimate e;
        e.target = Target::FourierSup;
        e.method = "Walsh-Hadamard transform";
        e.lower = e.upper = mx;
        e.lower_certificate = {"max |f^(chi)| over 2^" + std::to_string(bits.size()) + " characters", {0}, {mx}};
        e.upper_certificate = e.lower_certificate;
        round_outward(e);
        return e;
    }
    if (G.id().kind == GroupKind::Abelian) {
        TrigPolynomial P;
        P.dim = G.id().rank;
        for (const auto& [x, c] : f.terms())
            P.terms.emplace_back(std::vector<std::int64_t>(x.word.begin(), x.word.end()), c);
        SupOptions o = opt;
        if (P.dim > 1)
            o.initial_grid = std::min<std::size_t>(o.initial_grid, 4096);
        return trig_poly_sup(P, o);
    }
    throw InvalidInput("abelian_spectral_radius_exact needs an abelian catalog group, got " + G.name());
}

double finite_subgroup_spectral_radius(const AlgebraElement& f, std::size_t max_order) {
    const Group& G = f.group();
    if (f.empty())
        return 0.0;
    auto elems = generated_subgroup(G, f.support(), max_order);
    const auto n = static_cast<Eigen::Index>(elems.size());
    absl::flat_hash_map<GroupElement, Eigen::Index, ElementHash> index;
    for (Eigen::Index i = 0; i < n; ++i)
        index.emplace(elems[static_cast<std::size_t>(i)], i);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (const auto& [s, c] : f.terms())
            A(index.at(G.multiply(s, elems[static_cast<std::size_t>(j)])), j) += c;
    if (f.is_hermitian()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::optional<double> exact_spectral_radius(const AlgebraElement& f) {
    auto kind = f.group().id().kind;
    if (kind == GroupKind::BooleanSum)
        return abelian_spectral_radius_exact(f).lower_certificate.values.front();
    if (f.group().is_locally_finite())
        return finite_subgroup_spectral_radius(f);
    if (kind == GroupKind::Abelian) {
        auto e = abelian_spectral_radius_exact(f);
        return 0.5 * (e.lower + e.upper);
    }
    return std::nullopt;
}

}  // namespace specrad
