#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trajbench/ingest.hpp"
#include "trajbench/metrics.hpp"
#include "trajbench/report.hpp"
#include "trajbench/synth.hpp"
#include "trajbench/types.hpp"

// Command implementations behind the CLI. Exit codes:
//   0  success
//   1  partial (some scenarios missing or failed; reported and excluded)
//   2  configuration or IO error
namespace tb::cmd {

struct EvaluateOptions {
  std::filesystem::path manifest;
  std::filesystem::path pred_root;
  std::string model = "model";
  std::filesystem::path out_dir = "results";
  MetricConfig cfg;
  geo::DecodeOptions decode;
  double horizon_s = 0.0;  // 0 = full scenario duration
  std::optional<Split> split;
  bool score_failures = false;
  int jobs = 0;  // 0 = one per hardware thread
};

int cmd_evaluate(const EvaluateOptions& options, std::ostream& log);

struct ReportOptions {
  std::vector<std::filesystem::path> results_dirs;
  std::filesystem::path out_dir = "report";
};

int cmd_report(const ReportOptions& options, std::ostream& log);

struct HorizonOptions {
  EvaluateOptions base;
  std::vector<double> horizons_s;
};

int cmd_horizon(const HorizonOptions& options, std::ostream& log);

struct SynthOptions {
  std::filesystem::path out_dir = "synthetic";
  int count = 20;
  std::uint64_t seed = 1;
  synth::DegradationKind kind = synth::DegradationKind::gaussian_noise;
  double magnitude = 0.0;
  double length_m = 5.0;
  int n_points = 121;
  double frame_rate = 25.0;
  ingest::PoseFileFormat pred_format = ingest::PoseFileFormat::pose_lines;
};

int cmd_synth(const SynthOptions& options, std::ostream& log);

struct SweepOptions {
  synth::Shape shape = synth::Shape::straight;
  synth::DegradationKind kind = synth::DegradationKind::gaussian_noise;
  std::vector<double> magnitudes;
  int repeats = 50;
  MetricConfig cfg;
  std::uint64_t seed = 1;
  std::filesystem::path out_csv = "sweep.csv";
};

int cmd_sweep(const SweepOptions& options, std::ostream& log);

// Shared helpers (also used by tests).
std::vector<report::ScenarioRecord> evaluate_manifest(
    const EvaluateOptions& options, const ingest::Manifest& manifest);
std::string scenario_json(const report::ScenarioRecord& record,
                          const std::string& model, const MetricConfig& cfg);
report::ScenarioRecord scenario_from_json(const std::string& text);

}  // namespace tb::cmd
