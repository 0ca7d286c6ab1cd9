// Internal JSON (de)serialization for configs and results. Not installed.
#pragma once

#include <json.hpp>

#include "miscal/experiment.hpp"

namespace miscal::json_io {

using nlohmann::json;

json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const json& j);

json snippet_to_json(const SnippetResult& r);
SnippetResult snippet_from_json(const json& j);

json euler_to_json(const EulerMisalignment& e);
EulerMisalignment euler_from_json(const json& j);

}  // namespace miscal::json_io
