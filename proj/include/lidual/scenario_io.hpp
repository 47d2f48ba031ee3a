#pragma once

#include <string>

#include <json.hpp>

#include "lidual/scenario.hpp"

namespace lidual {

/// Scenario document:
///   { "name", "assets", "nodes": [{"id", "parent", "p", "S": [...], "e", "dk"}],
///     "theta0": [ids], "clock_bound", "q": {"t": value}, "x",
///     "utility": {"family": "log" | "power", "R", "weights": {id: w}} }
/// Missing "e", "dk", "S" default to zero; missing "q" entries to 0.
/// Throws MalformedScenario on schema errors, MalformedTree from the tree build.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace lidual
