#include "specrad/estimate.hpp"

#include <cmath>

namespace specrad {

std::string to_string(Target t) {
    switch (t) {
    case Target::GrowthRate: return "growth_rate";
    case Target::L1Radius: return "r_l1";
    case Target::CstarRadius: return "r_cstar";
    case Target::CstarNorm: return "norm_cstar";
    case Target::OpNormP: return "opnorm_p";
    case Target::PfStarNorm: return "pfstar_p";
    case Target::PfStarRadius: return "r_pfstar_p";
    case Target::FourierSup: return "fourier_sup";
    }
    return "unknown";
}

void round_outward(SpectralEstimate& e) {
    e.lower -= kOutwardSlack * std::abs(e.lower);
    e.upper += kOutwardSlack * std::abs(e.upper);
    if (e.lower < 0.0 && e.lower > -1e-300)
        e.lower = 0.0;
}

}  // namespace specrad
