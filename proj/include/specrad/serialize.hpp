#pragma once

#include <nlohmann/json.hpp>

#include "specrad/algebra.hpp"
#include "specrad/estimate.hpp"
#include "specrad/lab.hpp"

namespace specrad {

/// Finite doubles as numbers; inf and nan as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double x);

nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const SpectralEstimate& e);
nlohmann::json to_json(const Quantity& q);
nlohmann::json to_json(const Comparison& c);
nlohmann::json to_json(const ExperimentReport& r);

/// Inverse of to_json(ExperimentReport); used to revalidate stored reports.
ExperimentReport report_from_json(const nlohmann::json& j);

/// [[normal form, re, im], ...] in normal-form order.
nlohmann::json algebra_to_json(const AlgebraElement& f);
/// Accepts the format above; repeated entries are summed. Throws SchemaError.
AlgebraElement algebra_from_json(const Group& g, const nlohmann::json& j);

}  // namespace specrad
