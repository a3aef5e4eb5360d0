#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajbench/geometry.hpp"
#include "trajbench/types.hpp"

namespace tb::report {

enum class ScenarioStatus { ok, missing, failed };

std::string to_string(ScenarioStatus s);

// One evaluated (or failed) scenario plus the annotation needed for grouping.
struct ScenarioRecord {
  std::string scenario_id;
  TargetMode target_mode = TargetMode::explicit_target;
  std::string category;
  ScenarioStatus status = ScenarioStatus::ok;
  std::string reason;  // for missing/failed
  ScenarioResult result;
  geo::DecodeInfo decode;
};

struct GroupStats {
  std::string group;
  int n = 0;
  double fde = 0.0;
  double ade = 0.0;
  double mr = 0.0;
  double se = 0.0;
  double ac = 0.0;
  double wo = 0.0;
};

// Grouped means: "all", "explicit", "implicit", then "category:<name>".
// The explicit and implicit groups partition "all".
struct AggregateReport {
  std::vector<GroupStats> rows;
  int n_scored = 0;
  int n_missing = 0;
  int n_failed = 0;
  MetricConfig config;
};

// score_failures: missing/failed scenarios enter the bounded-score means as
// worst case (se = ac = wo = 0, mr = 100) instead of being excluded;
// unbounded ADE/FDE means always cover scored scenarios only.
AggregateReport aggregate(const std::vector<ScenarioRecord>& records,
                          const MetricConfig& cfg, bool score_failures);

// CSV with "# trajbench <version>" / "# config: <json>" comment headers,
// columns group,n,fde,ade,mr,se,ac,wo, floats fixed at 6 decimals.
std::string aggregate_csv(const AggregateReport& report);

// One model's headline numbers as read back from its aggregate.csv.
struct ModelRun {
  std::string model;
  GroupStats all;
  MetricConfig config;
  std::string version;
};

ModelRun load_aggregate_csv(const std::filesystem::path& path,
                            const std::string& model);

// Markdown table, models sorted by WO descending.
std::string leaderboard_markdown(std::vector<ModelRun> runs);

// Plot-ready axes, each mapped to [0,1]: exp(-ADE/tau), exp(-FDE/tau),
// 1 - MR/100, SE, AC.
std::string radar_csv(std::vector<ModelRun> runs);

std::string config_to_json(const MetricConfig& cfg);
MetricConfig config_from_json(const std::string& text);

// First differing field, e.g. "sigma_se 0.6 vs 0.5"; nullopt when equal.
std::optional<std::string> config_mismatch(const MetricConfig& a,
                                           const MetricConfig& b);

}  // namespace tb::report
