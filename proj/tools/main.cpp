#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajbench/commands.hpp"
#include "trajbench/version.hpp"

namespace {

void add_config_flags(CLI::App* app, tb::MetricConfig& cfg) {
  app->add_option("--tau-miss", cfg.tau_miss, "Miss-rate threshold, m");
  app->add_option("--sigma-se", cfg.sigma_se, "Soft-endpoint tolerance, m");
  app->add_option("--corridor-m", cfg.corridor_m,
                  "Number of corridor reference points");
  app->add_option("--sigma-min", cfg.sigma_min, "Smallest corridor radius, m");
  app->add_option("--sigma-max", cfg.sigma_max, "Largest corridor radius, m");
  app->add_option("--beta", cfg.beta, "Corridor radius falloff width");
  app->add_option("--gamma", cfg.gamma, "Approach-consistency penalty rate");
  app->add_option("--w-ade", cfg.w_ade, "ADE weight");
  app->add_option("--w-fde", cfg.w_fde, "FDE weight");
  app->add_option("--w-mr", cfg.w_mr, "Miss-rate weight");
  app->add_option("--w-seac", cfg.w_seac, "SE*AC weight");
  app->add_option("--tau-ade", cfg.tau_ade, "ADE score scale, m");
  app->add_option("--tau-fde", cfg.tau_fde, "FDE score scale, m");
  app->add_option("--n-eval", cfg.n_eval, "Evaluation resample count");
  app->add_option_function<std::string>(
         "--aggregation",
         [&cfg](const std::string& v) {
           cfg.aggregation = v == "aggregate"
                                 ? tb::Aggregation::aggregate_then_score
                                 : tb::Aggregation::per_scenario_mean;
         },
         "Aggregation mode: per-scenario | aggregate")
      ->check(CLI::IsMember({"per-scenario", "aggregate"}));
  app->add_option_function<std::string>(
         "--coverage-semantics",
         [&cfg](const std::string& v) {
           cfg.coverage = v == "nearest" ? tb::CoverageSemantics::nearest
                                         : tb::CoverageSemantics::exists;
         },
         "Corridor coverage semantics: exists | nearest")
      ->check(CLI::IsMember({"exists", "nearest"}));
}

void add_decode_flags(CLI::App* app, tb::geo::DecodeOptions& decode) {
  app->add_option_function<std::string>(
         "--pose-convention",
         [&decode](const std::string& v) {
           decode.convention = v == "world-to-camera"
                                   ? tb::PoseConvention::world_to_camera
                                   : tb::PoseConvention::camera_to_world;
         },
         "Stored pose convention: camera-to-world | world-to-camera")
      ->check(CLI::IsMember({"camera-to-world", "world-to-camera"}));
  app->add_option_function<std::string>(
         "--scale-anchor",
         [&decode](const std::string& v) {
           decode.anchor_k =
               v == "last" ? tb::geo::kAnchorLast : std::stoi(v);
         },
         "Scale-recovery anchor frame: last | <index>");
}

void add_split_flag(CLI::App* app, std::optional<tb::Split>& split) {
  app->add_option_function<std::string>(
         "--split",
         [&split](const std::string& v) {
           if (v == "all")
             split.reset();
           else
             split = tb::split_from_string(v);
         },
         "Scenario filter: train | eval | all (default all)")
      ->check(CLI::IsMember({"train", "eval", "all"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory benchmark for camera paths decoded from "
               "generated videos"};
  app.set_version_flag("--version", std::string(tb::kVersion));
  app.require_subcommand(1);

  // evaluate
  tb::cmd::EvaluateOptions eval_opt;
  auto* eval = app.add_subcommand(
      "evaluate", "Score one model's predictions against a manifest");
  eval->add_option("--manifest", eval_opt.manifest, "Manifest JSON path")
      ->required();
  eval->add_option("--pred-root", eval_opt.pred_root,
                   "Directory with one pose file per scenario id")
      ->required();
  eval->add_option("--model", eval_opt.model, "Model name")->required();
  eval->add_option("--out", eval_opt.out_dir, "Results directory");
  eval->add_option("--horizon", eval_opt.horizon_s,
                   "Planning horizon in seconds (default: full)");
  eval->add_flag("--score-failures", eval_opt.score_failures,
                 "Count missing/failed scenarios as worst-case scores");
  eval->add_option("--jobs", eval_opt.jobs, "Worker threads (0 = auto)");
  add_split_flag(eval, eval_opt.split);
  add_decode_flags(eval, eval_opt.decode);
  add_config_flags(eval, eval_opt.cfg);

  // report
  tb::cmd::ReportOptions report_opt;
  auto* rep = app.add_subcommand(
      "report", "Build a leaderboard from evaluation results");
  rep->add_option("results", report_opt.results_dirs,
                  "Per-model results directories")
      ->required();
  rep->add_option("--out", report_opt.out_dir, "Report output directory");

  // horizon
  tb::cmd::HorizonOptions horizon_opt;
  std::vector<double> horizons;
  auto* hor = app.add_subcommand(
      "horizon", "Evaluate at several planning horizons");
  hor->add_option("--manifest", horizon_opt.base.manifest, "Manifest JSON path")
      ->required();
  hor->add_option("--pred-root", horizon_opt.base.pred_root,
                  "Directory with one pose file per scenario id")
      ->required();
  hor->add_option("--model", horizon_opt.base.model, "Model name")->required();
  hor->add_option("--out", horizon_opt.base.out_dir, "Results directory");
  hor->add_option("--horizons", horizons, "Horizons in seconds")->required();
  hor->add_option("--jobs", horizon_opt.base.jobs, "Worker threads (0 = auto)");
  hor->add_flag("--score-failures", horizon_opt.base.score_failures,
                "Count missing/failed scenarios as worst-case scores");
  add_split_flag(hor, horizon_opt.base.split);
  add_decode_flags(hor, horizon_opt.base.decode);
  add_config_flags(hor, horizon_opt.base.cfg);

  // synth
  tb::cmd::SynthOptions synth_opt;
  std::string synth_kind = "gaussian_noise";
  std::string synth_format = "pose_lines";
  auto* syn = app.add_subcommand(
      "synth", "Generate a synthetic benchmark with known degradations");
  syn->add_option("--out", synth_opt.out_dir, "Output directory");
  syn->add_option("--count", synth_opt.count, "Number of scenarios");
  syn->add_option("--seed", synth_opt.seed, "Random seed");
  syn->add_option("--degradation", synth_kind,
                  "gaussian_noise | heading_bias | scale_error | early_stop | "
                  "endpoint_overshoot | static_freeze");
  syn->add_option("--magnitude", synth_opt.magnitude,
                  "Degradation magnitude (kind-specific units)");
  syn->add_option("--length", synth_opt.length_m, "Path length, m");
  syn->add_option("--points", synth_opt.n_points, "Poses per trajectory");
  syn->add_option("--frame-rate", synth_opt.frame_rate, "Frames per second");
  syn->add_option("--pred-format", synth_format,
                  "pose_lines | extrinsics | encoding")
      ->check(CLI::IsMember({"pose_lines", "extrinsics", "encoding"}));

  // sweep
  tb::cmd::SweepOptions sweep_opt;
  std::string sweep_shape = "straight";
  std::string sweep_kind = "gaussian_noise";
  auto* swp = app.add_subcommand(
      "sweep", "Metric sensitivity sweep over degradation magnitudes");
  swp->add_option("--shape", sweep_shape,
                  "straight | arc | s_curve | stop_turn")
      ->check(CLI::IsMember({"straight", "arc", "s_curve", "stop_turn"}));
  swp->add_option("--degradation", sweep_kind, "Degradation kind");
  swp->add_option("--magnitudes", sweep_opt.magnitudes,
                  "Magnitudes to sweep")
      ->required();
  swp->add_option("--repeats", sweep_opt.repeats, "Scenarios per magnitude");
  swp->add_option("--seed", sweep_opt.seed, "Random seed");
  swp->add_option("--out", sweep_opt.out_csv, "Output CSV path");
  add_config_flags(swp, sweep_opt.cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return tb::cmd::cmd_evaluate(eval_opt, std::cout);
    if (rep->parsed()) return tb::cmd::cmd_report(report_opt, std::cout);
    if (hor->parsed()) {
      horizon_opt.horizons_s = horizons;
      return tb::cmd::cmd_horizon(horizon_opt, std::cout);
    }
    if (syn->parsed()) {
      synth_opt.kind = tb::synth::degradation_from_string(synth_kind);
      if (synth_format == "extrinsics")
        synth_opt.pred_format = tb::ingest::PoseFileFormat::extrinsics_table;
      else if (synth_format == "encoding")
        synth_opt.pred_format = tb::ingest::PoseFileFormat::pose_encoding;
      return tb::cmd::cmd_synth(synth_opt, std::cout);
    }
    if (swp->parsed()) {
      sweep_opt.shape = tb::synth::shape_from_string(sweep_shape);
      sweep_opt.kind = tb::synth::degradation_from_string(sweep_kind);
      return tb::cmd::cmd_sweep(sweep_opt, std::cout);
    }
  } catch (const tb::Error& e) {
    std::cout << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
