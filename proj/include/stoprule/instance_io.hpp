#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "stoprule/distributions.hpp"

namespace stoprule {

/// Parses `{"distributions": [...]}`. Throws ValidationError naming the
/// offending index for unknown kinds or missing fields. Parameter-level
/// problems (low >= high, ...) are left to validate_instance.
ProblemInstance instance_from_json(const nlohmann::json& doc);
ProblemInstance load_instance(const std::filesystem::path& path);

nlohmann::json to_json(const Distribution& d);
nlohmann::json to_json(const ProblemInstance& instance);

}  // namespace stoprule
