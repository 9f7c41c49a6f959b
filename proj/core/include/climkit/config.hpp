#pragma once

// JSON configuration documents: loading helpers with field-path error
// messages, and (de)serialization of calibrated emulators.

#include <optional>
#include <string>

#include <json.hpp>

#include "climkit/carbon.hpp"

namespace climkit {

using Json = nlohmann::json;

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& doc);

// Lookup with "a.b.c" paths; throws ConfigError naming the missing field.
const Json& require_field(const Json& doc, const std::string& path);
double require_number(const Json& doc, const std::string& path);
std::string require_string(const Json& doc, const std::string& path);

template <typename T>
T field_or(const Json& doc, const std::string& key, T fallback) {
    if (doc.contains(key) && !doc.at(key).is_null()) return doc.at(key).get<T>();
    return fallback;
}

// A calibrated emulator document: topology, fitted parameters, extreme
// scaling factors, and the optional land-capacity rule.
struct CalibrationDoc {
    std::string name;
    std::string background;  // "PI" | "PD"
    Topology topology;
    OperatorParams params;
    std::optional<double> c_plus;
    std::optional<double> c_minus;
    std::optional<LandCapacityRule> land_rule;

    Emulator make_emulator() const;
    // Weighted-family member for alpha in [-1, 1]; requires c_plus/c_minus.
    Emulator make_emulator(double alpha) const;
};

CalibrationDoc load_calibration(const std::string& path);
Json calibration_to_json(const CalibrationDoc& doc);
void save_calibration(const std::string& path, const CalibrationDoc& doc);

}  // namespace climkit
