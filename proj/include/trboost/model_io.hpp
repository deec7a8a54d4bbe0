#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "trboost/boosting.hpp"

namespace trboost {

// Model files are JSON. Doubles are written in shortest round-trip form, so
// a reloaded model predicts bit-identically. Non-finite values are stored as
// the strings "inf", "-inf" and "nan".
inline constexpr int kFormatVersion = 1;

nlohmann::json to_json(const Ensemble& ensemble);
Ensemble ensemble_from_json(const nlohmann::json& doc);

std::string serialize(const Ensemble& ensemble);
Ensemble deserialize(const std::string& text);

void save_model(const Ensemble& ensemble, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace trboost
