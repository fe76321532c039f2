#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nagd/experiments.hpp"

namespace nagd {

/// Task-specific defaults used when a config leaves a field out.
ExperimentSpec default_spec(TaskKind task);

/// Relevant hyperparameters of `opt` as JSON (kind plus the fields its
/// algorithm reads).
nlohmann::json optimizer_to_json(const OptimizerSpec& opt);

/// Starts from the kind's defaults and overlays the given keys. Unknown
/// keys are rejected.
OptimizerSpec optimizer_from_json(const nlohmann::json& j, const std::string& where = "optimizer");

/// Every field of `spec`, so that spec_from_json(spec_to_json(s)) == s.
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Overlays `j` onto default_spec(task) and validates the result. A
/// manifest (an object carrying "spec") is accepted in place of a config.
/// Throws ConfigError naming the offending field.
ExperimentSpec spec_from_json(const nlohmann::json& j, TaskKind task);

/// Reads a JSON document; parse errors surface as ConfigError("config", ...).
nlohmann::json load_json_file(const std::filesystem::path& path);

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);

} // namespace nagd
