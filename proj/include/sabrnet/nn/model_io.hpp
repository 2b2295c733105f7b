#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sabrnet/nn/model.hpp"

namespace sabrnet::nn {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const ModelBundle& b);
/// Throws ConfigError on malformed documents, ShapeMismatch on bad shapes.
ModelBundle bundle_from_json(const nlohmann::json& j);

/// Pretty-printed JSON; doubles are written with round-trip precision.
std::string model_json(const ModelBundle& b);
void save_model(const std::filesystem::path& path, const ModelBundle& b);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace sabrnet::nn
