#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specrad/algebra.hpp"
#include "specrad/lab.hpp"

namespace specrad {

enum class WeightKind { MaxTower, Polynomial, Table };
std::string to_string(WeightKind k);

/// Level of x in the catalog tower G_1 < G_2 < ...: the least i with x in G_i.
/// locfin.Sinf uses G_i = S_(i+1), locfin.Z2sum uses G_i = Z_2^i.
std::size_t tower_level(const Group& g, const GroupElement& x);
/// |G_i|.
double tower_order(const Group& g, std::size_t i);
/// Number of levels the catalog group can represent.
std::size_t tower_depth(const Group& g);

/// A Beurling weight: symmetric, >= 1, with w(e) = 1.
class Weight {
public:
    static Weight polynomial(const Group& g, double alpha);
    /// Values for listed elements, 1 elsewhere.
    static Weight table(const Group& g, const std::vector<std::pair<GroupElement, double>>& values);

    double operator()(const GroupElement& x) const { return eval_(x); }
    WeightKind kind() const { return kind_; }
    const Group& group() const { return *group_; }
    const nlohmann::json& params() const { return params_; }

private:
    friend Weight build_pytlik_weight(const Group& g, std::vector<double> n_seq);
    Weight(const Group& g, WeightKind kind, std::function<double(const GroupElement&)> eval, nlohmann::json params)
        : group_(&g), kind_(kind), eval_(std::move(eval)), params_(std::move(params)) {}

    const Group* group_;
    WeightKind kind_;
    std::function<double(const GroupElement&)> eval_;
    nlohmann::json params_;
};

/// n_i = i^2 |G_(i+1)|, i = 1..levels-1, so that the mass of 1/w on G_(i+1)\G_i is below 1/i^2.
std::vector<double> default_tower_sequence(const Group& g, std::size_t levels);

/// w = 1 on G_1 and 1 + n_i on G_(i+1) \ G_i. n_seq[i-1] holds n_i and must
/// be strictly increasing; an empty n_seq selects default_tower_sequence.
Weight build_pytlik_weight(const Group& g, std::vector<double> n_seq = {});

/// Sum of 1/w over G_L for L = 1..levels, from the level cardinalities.
std::vector<double> inverse_weight_partial_sums(const Weight& w, std::size_t levels);

/// Normal-form string -> value.
nlohmann::json weight_table(const Weight& w, const std::vector<GroupElement>& elements);

/// sum |f(s)| w(s).
double weighted_norm(const AlgebraElement& f, const Weight& w);

/// ||f*f||_(1,w) <= K ||f||_(1,w)^(1+theta) ||f||_1^(1-theta).
ExperimentReport check_differential_inequality(const AlgebraElement& f, const Weight& w, double K, double theta,
                                               double tol = 1e-6);

/// The same check on `samples` random Hermitian elements with `terms` points
/// from the radius-`radius` pool; details carry the smallest K that works for
/// every sample.
ExperimentReport differential_sweep(const Weight& w, double K, double theta, std::size_t samples, std::size_t terms,
                                    std::size_t radius, std::uint64_t seed, double tol = 1e-6);

/// Weighted and unweighted power certificates ||f^(2^k)||^(2^-k) against the
/// exact radius (Walsh-Hadamard or dense finite-subgroup spectrum). Certified
/// comparisons: the exact radius is below both upper certificates. The
/// Richardson estimates of both sequences must lie within `agreement` of
/// the exact value, otherwise the verdict is at best inconclusive.
ExperimentReport check_pytlik_radius_equality(const AlgebraElement& f, const Weight& w, std::size_t doublings,
                                              double agreement = 5e-3, const LabOptions& opt = {});

}  // namespace specrad
