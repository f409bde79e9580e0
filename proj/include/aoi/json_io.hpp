#pragma once

#include <string>

#include <json.hpp>

#include "aoi/distributions.hpp"

namespace aoi {

/// {"kind": "shifted_exponential", "rate": 1.0, "shift": 0.5}
nlohmann::json to_json(const DistributionSpec& dist);
/// Throws InvalidDistribution on unknown kinds, missing or mistyped fields.
DistributionSpec distribution_from_json(const nlohmann::json& j);
/// Parses inline JSON text, or reads the file when the text starts with '@'.
DistributionSpec parse_distribution(const std::string& text);

}  // namespace aoi

namespace nlohmann {

template <>
struct adl_serializer<aoi::DistributionSpec> {
    static aoi::DistributionSpec from_json(const json& j) { return aoi::distribution_from_json(j); }
    static void to_json(json& j, const aoi::DistributionSpec& d) { j = aoi::to_json(d); }
};

}  // namespace nlohmann
