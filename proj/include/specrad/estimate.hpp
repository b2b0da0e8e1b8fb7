#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specrad {

/// Which functional a bracket refers to.
enum class Target {
    GrowthRate,    // nu_S
    L1Radius,      // spectral radius in l^1(G)
    CstarRadius,   // spectral radius in the reduced C*-algebra
    CstarNorm,     // ||lambda_2(f)||
    OpNormP,       // ||lambda_p(f)||
    PfStarNorm,    // max(||lambda_p(f)||, ||lambda_q(f)||)
    PfStarRadius,  // spectral radius in PF*_p
    FourierSup,    // sup of |f^| over the dual group
};

std::string to_string(Target t);

/// A sequence of bounds together with the index that produced each one
/// (power, radius, iteration, ...).
struct Certificate {
    std::string label;
    std::vector<double> index;
    std::vector<double> values;

    void push(double i, double v) {
        index.push_back(i);
        values.push_back(v);
    }
    bool empty() const { return values.empty(); }
};

struct SpectralEstimate {
    double lower = 0.0;
    double upper = 0.0;
    Certificate lower_certificate;
    Certificate upper_certificate;
    std::string method;
    Target target = Target::L1Radius;

    /// Model-based point estimate. Never used as a bound.
    std::optional<double> estimate;
    std::string estimate_label;

    /// False when a budget cut the computation short; the bracket is still
    /// valid but built from fewer stages.
    bool complete = true;

    std::map<std::string, std::vector<double>> diagnostics;

    double width() const { return upper - lower; }
    bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Relative slack applied when rounding a bracket outward.
inline constexpr double kOutwardSlack = 1e-12;

/// Widens [lower, upper] by kOutwardSlack relative to each endpoint.
void round_outward(SpectralEstimate& e);

}  // namespace specrad
