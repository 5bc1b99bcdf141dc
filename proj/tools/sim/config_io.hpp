#pragma once

#include <string>

#include <json.hpp>

#include "ivpb/model.hpp"

namespace ivpb::cli {

// Sections grid, time, initial_data, collision, poisson, output. Unknown keys are errors.
// Comments (// and /* */) are allowed in the file.
RunConfig parse_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& doc);
// dt is written resolved, so the echo parses back to the same run
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace ivpb::cli
