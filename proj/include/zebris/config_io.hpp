#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "zebris/harness.hpp"
#include "zebris/invariants.hpp"
#include "zebris/market_model.hpp"
#include "zebris/metrics.hpp"

namespace zebris {

/// Scenario <-> JSON. Missing keys keep their defaults; unknown keys are
/// rejected. `base_dir` resolves a relative `activation_profile_file`.
ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
nlohmann::json scenario_to_json(const ScenarioConfig& scenario);

RunPlan plan_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json plan_to_json(const RunPlan& plan);

/// Reads a plan file, or a bare scenario file (no "scenario" key) wrapped in
/// a default plan.
RunPlan load_plan(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_number(double value);

std::string summary_csv(const std::vector<SummaryRow>& rows);
nlohmann::json summary_json(const std::vector<SummaryRow>& rows);

std::string trades_audit_header();
std::string trades_audit_row(const AuditedTrade& trade, const TradeRecord* detail = nullptr);
std::vector<AuditedTrade> read_trades_audit(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace zebris
