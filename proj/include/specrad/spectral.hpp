#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "specrad/algebra.hpp"
#include "specrad/estimate.hpp"
#include "specrad/exponent.hpp"

namespace specrad {

/// Bracket for the l^1 spectral radius. Upper certificate ||f^(2^k)||_1^(2^-k),
/// k = 0..max_doublings; for Hermitian f the lower certificate is the trace
/// moment bound ||f^(2^k)||_2^(2^-k), otherwise 0. The point estimate is the
/// Richardson step c_k^2 / c_(k-1). A budget stop returns the bracket of the
/// completed doublings with `complete = false`.
SpectralEstimate l1_spectral_radius(const AlgebraElement& f, std::size_t max_doublings,
                                    const TruncationPolicy& policy = {});

/// Trace-moment bracket for the reduced C*-radius of a Hermitian f:
/// m_2n = ||f^n||_2^2 gives the lower certificate m_2n^(1/2n), n = 1..max_n.
/// The point estimate fits log m_2n = c + 2n log rho - gamma log n on the
/// last third of the moments.
SpectralEstimate cstar_radius_hermitian(const AlgebraElement& f, std::size_t max_n,
                                        const TruncationPolicy& policy = {});

struct TruncationResult {
    double value = 0.0;
    std::size_t radius = 0;
    std::size_t ball_size = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct TruncationOptions {
    std::size_t max_iters = 10'000;
    double tol = 1e-10;
    /// Largest ball that will be materialised.
    std::size_t max_ball = 4'000'000;
};

/// Lower bound on ||lambda_2(f)||: sup of ||f*v||_2 / ||v||_2 over v supported
/// in the radius-R product set of supp f, supp f* and e, by power iteration on
/// the compression of lambda(f)^* lambda(f), started at delta_e and again at
/// the first sphere.
TruncationResult cstar_norm_lower_truncation(const AlgebraElement& f, std::size_t radius,
                                             const TruncationOptions& opt = {});

/// Same bound for radius 0..max_radius; each radius is warm-started from the
/// previous maximiser, so the values are nondecreasing.
std::vector<TruncationResult> cstar_norm_truncation_profile(const AlgebraElement& f, std::size_t max_radius,
                                                            const TruncationOptions& opt = {});

/// Certified upper bounds on ||lambda_2(f)||, as a running minimum: ||f||_1,
/// then ||f^(2^k)||_1^(2^-k) for Hermitian f or ||(f* f)^(2^k)||_1^(2^-(k+1))
/// otherwise.
Certificate l2_norm_upper(const AlgebraElement& f, std::size_t doublings, const TruncationPolicy& policy = {});

struct LpOptions {
    /// Radius of the ball indicators used as test vectors.
    std::size_t radius = 3;
    std::size_t ball_budget = 20'000;
    /// Nonlinear power-method steps on f and on |f|.
    std::size_t power_iters = 8;
    /// Iterates stop growing once their support exceeds this.
    std::size_t vector_budget = 20'000;
    /// Doublings used for the l^2 upper bound.
    std::size_t u2_doublings = 3;
    TruncationPolicy policy{0.0, 200'000};
    /// Externally certified upper bound on ||lambda_2(f)||.
    std::optional<double> u2_bound;
    /// Additional test vectors for the lower bound.
    std::vector<AlgebraElement> test_vectors;
    /// Radius for the l^2 truncation bound (p = 2 only, 0 disables).
    std::size_t truncation_radius = 0;
    bool upper_only = false;
};

/// Bracket for ||lambda_p(f)||. Upper: ||f||_1^|2/p-1| U_2^(1-|2/p-1|) by
/// Riesz-Thorin between l^1 (or l^inf) and l^2. Lower: ||f*v||_p / ||v||_p
/// over delta_e, ball indicators, the supplied test vectors and the iterates
/// of the nonlinear power method on f and on |f|.
SpectralEstimate lp_opnorm_bounds(const AlgebraElement& f, const Exponent& p, const LpOptions& opt = {});

/// max(||lambda_p(f)||, ||lambda_q(f)||), 1/p + 1/q = 1. Test vectors in
/// `opt` are used for the lambda_p side.
SpectralEstimate pfstar_norm_bounds(const AlgebraElement& f, const Exponent& p, const LpOptions& opt = {});

/// Bracket for the PF*_p spectral radius of a Hermitian f. Lower: the larger
/// of the moment bound and the truncation bound; upper: min over k of the
/// PF*_p norm bound of f^(2^k), to the power 2^-k.
SpectralEstimate pfstar_radius_bracket(const AlgebraElement& f, const Exponent& p, std::size_t max_doublings,
                                       std::size_t radius, std::size_t max_moments = 12,
                                       const TruncationPolicy& policy = {});

/// c_k^2 / c_(k-1): cancels a constant factor C^(2^-k) in c_k.
double richardson(double previous, double last);

struct MomentFit {
    double rho = 0.0;
    double gamma = 0.0;
    double log_c = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of log m_2n = log_c + 2n log rho - gamma log n over the
/// last max(3, N/3) entries; moments[i] holds m_2(i+1).
std::optional<MomentFit> fit_moments(const std::vector<double>& moments);

}  // namespace specrad
