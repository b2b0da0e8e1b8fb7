#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "specrad/algebra.hpp"
#include "specrad/estimate.hpp"

namespace specrad {

/// Trigonometric polynomial sum_m c_m exp(i m.theta) on the d-torus.
struct TrigPolynomial {
    std::size_t dim = 1;
    std::vector<std::pair<std::vector<std::int64_t>, Complex>> terms;

    Complex operator()(const std::vector<double>& theta) const;
};

struct SupOptions {
    /// Target width of the returned bracket.
    double tol = 1e-11;
    /// Number of starting cells, spread evenly over the torus.
    std::size_t initial_grid = 4096;
    std::size_t max_cells = 2'000'000;
};

/// Bracket for sup |P| over the torus by branch and bound on G = |P|^2,
/// bounding each cell by G(c) + |grad G(c)| r + M2 r^2 / 2 where M2 is the
/// sum of |g_k| |k|^2 over the coefficients of G.
SpectralEstimate trig_poly_sup(const TrigPolynomial& P, const SupOptions& opt = {});

/// Spectral radius of f in l^1(G) for abelian catalog groups, i.e. the sup
/// of |f^| over the dual group: exact Walsh-Hadamard transform on the
/// coordinates used by f in the Boolean sum, a certified bracket on Z^d.
/// Throws InvalidInput for non-abelian groups.
SpectralEstimate abelian_spectral_radius_exact(const AlgebraElement& f, const SupOptions& opt = {});

/// Largest eigenvalue modulus of lambda(f) restricted to the finite subgroup
/// generated by supp f, via a dense eigensolver. Throws BudgetExceeded when
/// the subgroup has more than `max_order` elements.
double finite_subgroup_spectral_radius(const AlgebraElement& f, std::size_t max_order = 5040);

/// Exact spectral radius when one of the two oracles above applies.
std::optional<double> exact_spectral_radius(const AlgebraElement& f);

/// In-place fast Walsh-Hadamard transform; size must be a power of two.
void walsh_hadamard(std::vector<Complex>& a);

}  // namespace specrad
