#pragma once

#include <filesystem>
#include <string>

#include "smoothfix/model.hpp"
#include "json.hpp"

namespace smoothfix {

// Model configuration schema:
//   {"model": {"type": "biggins", "lambda": {"re": 0.7, "im": 0.7}}}
//   {"model": {"type": "biggins", "lambda": {"modulus": 2.15, "arg": 0.2732}}}
//   {"model": {"type": "polya", "b": 8}}
//   {"model": {"type": "tabular",
//              "atoms": [{"probability": 0.5, "weights": [[0.5, 0.0], [0.5, 0.0]]}, ...]}}
// The outer {"model": ...} wrapper is optional.
WeightModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const WeightModel& model);
WeightModel load_model(const std::filesystem::path& path);

// Stable 16-hex-digit hash of the canonical JSON form.
std::string model_fingerprint(const WeightModel& model);

Complex complex_from_json(const nlohmann::json& j);
nlohmann::json complex_to_json(Complex z);

}  // namespace smoothfix
