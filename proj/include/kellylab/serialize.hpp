#pragma once

#include <string>

#include <json.hpp>

#include "kellylab/betting.hpp"
#include "kellylab/process_model.hpp"
#include "kellylab/report.hpp"

namespace kellylab {

inline constexpr int kSchemaVersion = 1;

/// Parses JSON text; syntax errors become SchemaError with "source:line:column".
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);

/// Kernel tables are written as {"own_order": k | "full", "other_order": k | "full",
/// "rows": {"<own labels>|<other labels>": [probabilities]}} with window labels
/// comma-separated, oldest first.
nlohmann::json to_json(const ProcessModel& model);
ProcessModel model_from_json(const nlohmann::json& j);

/// {"type": "binary", "R", "Rbar"} or {"type": "horse_race", "M", "odds": [table per step]}.
/// Odds rows are keyed by horse indices 0..M-1; a plain array of M numbers
/// gives the same odds at every step.
nlohmann::json to_json(const GameSpec& game);
GameSpec game_from_json(const nlohmann::json& j, const ProcessModel& model);

/// {"type": "binary" | "horse_race", "kind", "lambda", "tables": [table per step]}.
nlohmann::json to_json(const Strategy& strategy, const ProcessModel& model);
Strategy strategy_from_json(const nlohmann::json& j, const ProcessModel& model, const GameSpec& game);

nlohmann::json to_json(const Estimate& estimate);
Estimate estimate_from_json(const nlohmann::json& j);

/// Wall time is left out unless requested so that reports are reproducible.
nlohmann::json to_json(const EqualityReport& report, bool include_timing = false);
EqualityReport report_from_json(const nlohmann::json& j);

}  // namespace kellylab
