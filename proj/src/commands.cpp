#include "trajbench/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "trajbench/version.hpp"

namespace tb::cmd {

namespace {

using json = nlohmann::ordered_json;

std::string horizon_tag(double horizon_s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", horizon_s);
  return std::string("horizon_") + buf + "s";
}

int thread_count(int jobs, std::size_t work) {
  unsigned n = jobs > 0 ? static_cast<unsigned>(jobs)
                        : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<int>(std::min<std::size_t>(n, work));
}

// Prediction files are named <scenario_id>.<ext>; the format inside is
// auto-detected, so the extension is free-form.
std::map<std::string, std::filesystem::path> index_predictions(
    const std::filesystem::path& root) {
  std::map<std::string, std::filesystem::path> index;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (auto it = index.find(stem); it != index.end())
      throw Error("multiple prediction files for scenario \"" + stem + "\": " +
                  it->second.filename().string() + " and " +
                  entry.path().filename().string());
    index[stem] = entry.path();
  }
  return index;
}

report::ScenarioRecord evaluate_one(const EvaluateOptions& options,
                                    const std::filesystem::path& manifest_dir,
                                    const ingest::ScenarioDesc& desc,
                                    const std::filesystem::path* pred_path) {
  report::ScenarioRecord rec;
  rec.scenario_id = desc.id;
  rec.target_mode = desc.target_mode;
  rec.category = desc.category;
  if (pred_path == nullptr) {
    rec.status = report::ScenarioStatus::missing;
    rec.reason = "no prediction file";
    return rec;
  }
  try {
    const Scenario scenario = ingest::load_scenario(manifest_dir, desc);
    const Trajectory pred = ingest::parse_any(ingest::read_file(*pred_path));
    metrics::EvalOptions eval;
    eval.decode = options.decode;
    eval.horizon_s = options.horizon_s;
    auto evaluation =
        metrics::evaluate_scenario(scenario, pred, options.cfg, eval);
    rec.result = std::move(evaluation.result);
    rec.decode = evaluation.decode;
    rec.status = report::ScenarioStatus::ok;
  } catch (const Error& e) {
    rec.status = report::ScenarioStatus::failed;
    rec.reason = e.what();
  }
  return rec;
}

}  // namespace

std::vector<report::ScenarioRecord> evaluate_manifest(
    const EvaluateOptions& options, const ingest::Manifest& manifest) {
  const auto manifest_dir = options.manifest.parent_path();
  const auto predictions = index_predictions(options.pred_root);

  std::vector<const ingest::ScenarioDesc*> selected;
  for (const auto& desc : manifest.scenarios)
    if (!options.split || desc.split == *options.split)
      selected.push_back(&desc);

  std::vector<report::ScenarioRecord> records(selected.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= selected.size()) return;
      const auto& desc = *selected[i];
      const auto it = predictions.find(desc.id);
      records[i] = evaluate_one(options, manifest_dir, desc,
                                it == predictions.end() ? nullptr
                                                        : &it->second);
    }
  };
  const int n_threads = thread_count(options.jobs, selected.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

std::string scenario_json(const report::ScenarioRecord& record,
                          const std::string& model, const MetricConfig& cfg) {
  json j;
  j["scenario_id"] = record.scenario_id;
  j["model"] = model;
  j["category"] = record.category;
  j["target_mode"] = to_string(record.target_mode);
  j["status"] = report::to_string(record.status);
  if (record.status == report::ScenarioStatus::ok) {
    j["metrics"] = {{"ade", record.result.ade}, {"fde", record.result.fde},
                    {"mr", record.result.mr},   {"se", record.result.se},
                    {"ac", record.result.ac},   {"wo", record.result.wo}};
    j["horizon_s"] = record.result.horizon_s;
    j["decode"] = {{"lambda", record.decode.lambda},
                   {"anchor_k", record.decode.anchor_k},
                   {"convention", to_string(record.decode.convention)},
                   {"degenerate", record.decode.degenerate}};
  } else {
    j["reason"] = record.reason;
  }
  j["config"] = json::parse(report::config_to_json(cfg));
  j["version"] = std::string(kVersion);
  return j.dump(2) + "\n";
}

report::ScenarioRecord scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario json: ") + e.what());
  }
  report::ScenarioRecord rec;
  try {
    rec.scenario_id = j.at("scenario_id").get<std::string>();
    rec.category = j.at("category").get<std::string>();
    rec.target_mode =
        target_mode_from_string(j.at("target_mode").get<std::string>());
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") {
      rec.status = report::ScenarioStatus::ok;
      const auto& m = j.at("metrics");
      rec.result = ScenarioResult(
          rec.scenario_id, m.at("ade").get<double>(),
          m.at("fde").get<double>(), m.at("mr").get<double>(),
          m.at("se").get<double>(), m.at("ac").get<double>(),
          m.at("wo").get<double>(), j.at("horizon_s").get<double>());
      const auto& d = j.at("decode");
      rec.decode.lambda = d.at("lambda").get<double>();
      rec.decode.anchor_k = d.at("anchor_k").get<int>();
      rec.decode.degenerate = d.at("degenerate").get<bool>();
      rec.decode.convention =
          d.at("convention").get<std::string>() == "world_to_camera"
              ? PoseConvention::world_to_camera
              : PoseConvention::camera_to_world;
    } else if (status == "missing") {
      rec.status = report::ScenarioStatus::missing;
      rec.reason = j.value("reason", "");
    } else if (status == "failed") {
      rec.status = report::ScenarioStatus::failed;
      rec.reason = j.value("reason", "");
    } else {
      throw ParseError("scenario json: unknown status \"" + status + "\"");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario json: ") + e.what());
  }
  return rec;
}

namespace {

int run_evaluation(const EvaluateOptions& options, std::ostream& log,
                   const std::filesystem::path& model_dir) {
  const ingest::Manifest manifest = ingest::load_manifest(options.manifest);
  log << "manifest: " << manifest.scenarios.size() << " scenarios (train "
      << manifest.count(Split::train) << ", eval " << manifest.count(Split::eval)
      << ")\n";

  const auto records = evaluate_manifest(options, manifest);
  std::filesystem::create_directories(model_dir);
  for (const auto& rec : records)
    ingest::write_file(model_dir / (rec.scenario_id + ".json"),
                       scenario_json(rec, options.model, options.cfg));

  const auto agg =
      report::aggregate(records, options.cfg, options.score_failures);
  ingest::write_file(model_dir / "aggregate.csv", report::aggregate_csv(agg));

  for (const auto& rec : records)
    if (rec.status != report::ScenarioStatus::ok)
      log << "  " << report::to_string(rec.status) << " " << rec.scenario_id
          << (rec.reason.empty() ? "" : ": " + rec.reason) << "\n";
  log << "scored: " << agg.n_scored << " missing: " << agg.n_missing
      << " failed: " << agg.n_failed << "\n";
  for (const auto& row : agg.rows) {
    if (row.group != "all") continue;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "all: n=%d fde=%.3f ade=%.3f mr=%.2f se=%.3f ac=%.3f "
                  "wo=%.3f\n",
                  row.n, row.fde, row.ade, row.mr, row.se, row.ac, row.wo);
    log << buf;
  }
  return agg.n_missing + agg.n_failed > 0 ? 1 : 0;
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& options, std::ostream& log) {
  try {
    validate_config(options.cfg);
    if (!std::filesystem::is_directory(options.pred_root))
      throw Error("prediction root is not a directory: " +
                  options.pred_root.string());
    return run_evaluation(options, log, options.out_dir / options.model);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_report(const ReportOptions& options, std::ostream& log) {
  try {
    if (options.results_dirs.empty())
      throw Error("no results directories given");
    std::vector<report::ModelRun> runs;
    for (const auto& dir : options.results_dirs) {
      const auto csv = dir / "aggregate.csv";
      if (!std::filesystem::exists(csv))
        throw Error("no aggregate.csv under " + dir.string());
      runs.push_back(
          report::load_aggregate_csv(csv, dir.filename().string()));
    }
    for (std::size_t i = 1; i < runs.size(); ++i) {
      if (auto mismatch =
              report::config_mismatch(runs[0].config, runs[i].config))
        throw Error("config mismatch: " + *mismatch + " (" + runs[0].model +
                    " vs " + runs[i].model + ")");
    }
    const std::string board = report::leaderboard_markdown(runs);
    ingest::write_file(options.out_dir / "leaderboard.md", board);
    ingest::write_file(options.out_dir / "radar.csv",
                       report::radar_csv(runs));
    log << board;
    return 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_horizon(const HorizonOptions& options, std::ostream& log) {
  try {
    validate_config(options.base.cfg);
    if (options.horizons_s.empty()) throw Error("no horizons given");
    if (!std::filesystem::is_directory(options.base.pred_root))
      throw Error("prediction root is not a directory: " +
                  options.base.pred_root.string());

    std::string combined;
    combined += "# trajbench " + std::string(kVersion) + "\n";
    combined += "# config: " + report::config_to_json(options.base.cfg) + "\n";
    combined += "horizon_s,group,n,fde,ade,mr,se,ac,wo\n";
    int worst = 0;
    for (double horizon : options.horizons_s) {
      EvaluateOptions step = options.base;
      step.horizon_s = horizon;
      const auto model_dir =
          options.base.out_dir / options.base.model / horizon_tag(horizon);
      log << "--- horizon " << horizon << " s ---\n";
      worst = std::max(worst, run_evaluation(step, log, model_dir));

      // Re-read every group row for the combined table.
      const std::string csv = ingest::read_file(model_dir / "aggregate.csv");
      std::istringstream is(csv);
      std::string line;
      char hbuf[32];
      std::snprintf(hbuf, sizeof(hbuf), "%g", horizon);
      while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("group,", 0) == 0)
          continue;
        combined += std::string(hbuf) + "," + line + "\n";
      }
    }
    ingest::write_file(
        options.base.out_dir / options.base.model / "horizon.csv", combined);
    return worst;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_synth(const SynthOptions& options, std::ostream& log) {
  try {
    if (options.count < 1) throw Error("count must be >= 1");
    if (options.n_points < 4) throw Error("n_points must be >= 4");
    if (!(options.length_m > 0.0)) throw Error("length must be > 0");

    const synth::Shape shapes[] = {
        synth::Shape::straight, synth::Shape::arc, synth::Shape::s_curve,
        synth::Shape::stop_turn};
    ingest::Manifest manifest;
    manifest.format_version = "1.0";
    const double duration =
        static_cast<double>(options.n_points - 1) / options.frame_rate;

    for (int i = 0; i < options.count; ++i) {
      const synth::Shape shape = shapes[i % 4];
      const std::uint64_t seed = options.seed + 0x9e3779b9ull * (i + 1);
      char id[32];
      std::snprintf(id, sizeof(id), "synth_%03d", i);

      const Path2D gt =
          synth::gen_gt(shape, options.length_m, options.n_points, seed);
      const Trajectory gt_traj =
          synth::lift_to_poses(gt, options.frame_rate, ScaleStatus::metric,
                               FrameOfReference::world);
      ingest::write_file(options.out_dir / "gt" / (std::string(id) + ".txt"),
                         ingest::write_pose_lines(gt_traj));

      const Trajectory pred = synth::degrade(
          gt, synth::DegradationSpec{options.kind, options.magnitude, seed},
          options.frame_rate);
      std::string pred_name(id);
      std::string pred_text;
      switch (options.pred_format) {
        case ingest::PoseFileFormat::pose_lines:
          pred_name += ".txt";
          pred_text = ingest::write_pose_lines(pred);
          break;
        case ingest::PoseFileFormat::extrinsics_table:
          pred_name += ".csv";
          pred_text = ingest::write_extrinsics_table(pred);
          break;
        case ingest::PoseFileFormat::pose_encoding:
          pred_name += ".csv";
          pred_text = ingest::write_pose_encoding(pred);
          break;
      }
      ingest::write_file(options.out_dir / "pred" / pred_name, pred_text);

      ingest::ScenarioDesc desc;
      desc.id = id;
      desc.category = synth::to_string(shape);
      desc.prompt = "follow the " + synth::to_string(shape) + " course";
      desc.target_mode =
          i % 2 == 0 ? TargetMode::explicit_target : TargetMode::implicit_target;
      desc.split = Split::eval;
      desc.gt_file = "gt/" + std::string(id) + ".txt";
      desc.frame_rate = options.frame_rate;
      desc.duration_s = duration;
      manifest.scenarios.push_back(std::move(desc));
    }
    ingest::write_file(options.out_dir / "manifest.json",
                       ingest::write_manifest(manifest));
    log << "wrote " << options.count << " scenarios under "
        << options.out_dir.string() << "\n";
    return 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_sweep(const SweepOptions& options, std::ostream& log) {
  try {
    const auto rows = synth::sensitivity_sweep(
        options.shape, options.kind, options.magnitudes, options.repeats,
        options.cfg, options.seed);
    const std::string csv = synth::sweep_csv(rows);
    std::string file;
    file += "# trajbench " + std::string(kVersion) + "\n";
    file += "# config: " + report::config_to_json(options.cfg) + "\n";
    file += "# shape: " + synth::to_string(options.shape) +
            " degradation: " + synth::to_string(options.kind) +
            " seed: " + std::to_string(options.seed) + "\n";
    file += csv;
    ingest::write_file(options.out_csv, file);
    log << csv;
    return 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tb::cmd
