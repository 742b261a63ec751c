#pragma once

// JSON scenario documents.
//
// Top-level keys (all optional except model and participation):
//   name, duration, v_pp_ref, model {c_v, c_q}, participation, generators,
//   initial_svc_active, plant, inner, outer, reference_derivative,
//   u2_distribution, log_interval, tolerances, events
// Events are objects {"at": s, "kind": tag, ...payload}. Generator indices
// are 0-based.

#include "svc/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace svc {

/// Throws ParseError for malformed text and ValidationError (message
/// prefixed with the line of the offending value) for invalid content.
Scenario parse_scenario(const std::string& text);
Scenario parse_scenario_file(const std::filesystem::path& path);

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Pretty-printed document; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

/// "a.b.0.c=value" pairs. Values are read as JSON when they parse,
/// otherwise as strings. Throws InvalidArgument on a missing '='.
using Override = std::pair<std::string, std::string>;
Override parse_override(const std::string& assignment);
void apply_overrides(nlohmann::json& doc, const std::vector<Override>& overrides);

/// 1-based (line, column) of the value addressed by a JSON pointer, or of
/// its closest existing ancestor.
std::pair<std::size_t, std::size_t> locate(const std::string& text, const std::string& pointer);

} // namespace svc
