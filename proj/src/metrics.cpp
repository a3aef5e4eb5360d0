#include "trajbench/metrics.hpp"

#include <cmath>
#include <sstream>

namespace tb::metrics {

namespace {

void require_paired(const Path2D& pred, const Path2D& gt, const char* op) {
  if (pred.size() != gt.size()) {
    std::ostringstream os;
    os << op << ": length mismatch " << pred.size() << " vs " << gt.size();
    throw Error(os.str());
  }
}

}  // namespace

double ade(const Path2D& pred, const Path2D& gt) {
  require_paired(pred, gt, "ade");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    sum += (pred.points()[i] - gt.points()[i]).norm();
  return sum / static_cast<double>(pred.size());
}

double fde(const Path2D& pred, const Path2D& gt) {
  require_paired(pred, gt, "fde");
  return (pred.points().back() - gt.points().back()).norm();
}

double miss_rate(const Path2D& pred, const Path2D& gt, double tau) {
  require_paired(pred, gt, "miss_rate");
  if (!(tau > 0.0)) throw Error("miss_rate: tau must be > 0");
  std::size_t misses = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if ((pred.points()[i] - gt.points()[i]).norm() > tau) ++misses;
  return 100.0 * static_cast<double>(misses) /
         static_cast<double>(pred.size());
}

double soft_endpoint(const Path2D& pred, const Path2D& gt, double sigma) {
  require_paired(pred, gt, "soft_endpoint");
  if (!(sigma > 0.0)) throw Error("soft_endpoint: sigma must be > 0");
  const double d2 = (pred.points().back() - gt.points().back()).squaredNorm();
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

double corridor_radius(double p, const MetricConfig& cfg) {
  const double z = (p - 0.5) / cfg.beta;
  return cfg.sigma_min +
         (cfg.sigma_max - cfg.sigma_min) * std::exp(-0.5 * z * z);
}

CorridorSpec build_corridor(const Path2D& gt, const MetricConfig& cfg) {
  const Path2D samples = geo::resample(gt, cfg.corridor_m);
  CorridorSpec corridor;
  corridor.reference_points = samples.points();
  corridor.radii.reserve(cfg.corridor_m);
  corridor.progress.reserve(cfg.corridor_m);
  for (int i = 0; i < cfg.corridor_m; ++i) {
    const double p =
        static_cast<double>(i) / static_cast<double>(cfg.corridor_m - 1);
    corridor.progress.push_back(p);
    corridor.radii.push_back(corridor_radius(p, cfg));
  }
  return corridor;
}

double approach_consistency(const Path2D& pred, const CorridorSpec& corridor,
                            double gamma, CoverageSemantics semantics) {
  if (!(gamma > 0.0)) throw Error("approach_consistency: gamma must be > 0");
  if (corridor.reference_points.empty() ||
      corridor.reference_points.size() != corridor.radii.size())
    throw Error("approach_consistency: malformed corridor");
  const std::size_t n_points = pred.size();
  std::size_t n_covered = 0;
  for (const auto& point : pred.points()) {
    bool covered = false;
    if (semantics == CoverageSemantics::exists) {
      for (std::size_t i = 0; i < corridor.reference_points.size(); ++i) {
        if ((point - corridor.reference_points[i]).norm() <=
            corridor.radii[i]) {
          covered = true;
          break;
        }
      }
    } else {
      std::size_t nearest = 0;
      double best = (point - corridor.reference_points[0]).norm();
      for (std::size_t i = 1; i < corridor.reference_points.size(); ++i) {
        const double d = (point - corridor.reference_points[i]).norm();
        if (d < best) {
          best = d;
          nearest = i;
        }
      }
      covered = best <= corridor.radii[nearest];
    }
    if (covered) ++n_covered;
  }
  if (n_covered == n_points) return 1.0;
  const double miss_fraction =
      static_cast<double>(n_points - n_covered) / static_cast<double>(n_points);
  return std::exp(-gamma * miss_fraction);
}

double weighted_overall(double ade, double fde, double mr, double se,
                        double ac, const MetricConfig& cfg) {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!(ade >= 0.0) || !std::isfinite(ade))
    throw Error("weighted_overall: ade out of range");
  if (!(fde >= 0.0) || !std::isfinite(fde))
    throw Error("weighted_overall: fde out of range");
  if (!(mr >= 0.0 && mr <= 100.0))
    throw Error("weighted_overall: mr out of range");
  if (!in01(se)) throw Error("weighted_overall: se out of range");
  if (!in01(ac)) throw Error("weighted_overall: ac out of range");
  const double t_ade = cfg.w_ade * std::exp(-ade / cfg.tau_ade);
  const double t_fde = cfg.w_fde * std::exp(-fde / cfg.tau_fde);
  const double t_mr = cfg.w_mr * (1.0 - mr / 100.0);
  const double t_seac = cfg.w_seac * se * ac;
  // Grouped so the default weights reach exactly 1.0 on perfect inputs.
  return (t_fde + t_mr) + (t_ade + t_seac);
}

namespace {

ScenarioResult score_pair(const std::string& scenario_id, const Path2D& gt_eval,
                          const Path2D& pred_eval, const MetricConfig& cfg,
                          double horizon_s) {
  const double ade_v = ade(pred_eval, gt_eval);
  const double fde_v = fde(pred_eval, gt_eval);
  const double mr_v = miss_rate(pred_eval, gt_eval, cfg.tau_miss);
  const double se_v = soft_endpoint(pred_eval, gt_eval, cfg.sigma_se);
  const CorridorSpec corridor = build_corridor(gt_eval, cfg);
  const double ac_v =
      approach_consistency(pred_eval, corridor, cfg.gamma, cfg.coverage);
  const double wo_v = weighted_overall(ade_v, fde_v, mr_v, se_v, ac_v, cfg);
  return ScenarioResult(scenario_id, ade_v, fde_v, mr_v, se_v, ac_v, wo_v,
                        horizon_s);
}

std::pair<Path2D, Path2D> prepare_pair(const Scenario& scenario,
                                       const Path2D& gt, const Path2D& pred,
                                       const MetricConfig& cfg,
                                       double horizon_s) {
  if (horizon_s > 0.0 && horizon_s != scenario.duration_s)
    return geo::truncate_horizon(gt, pred, horizon_s, scenario.duration_s,
                                 cfg.n_eval);
  return {geo::resample(gt, cfg.n_eval), geo::resample(pred, cfg.n_eval)};
}

}  // namespace

ScenarioResult evaluate_scenario(const Scenario& scenario, const Path2D& pred,
                                 const MetricConfig& cfg, double horizon_s) {
  const double used_horizon =
      horizon_s > 0.0 ? horizon_s : scenario.duration_s;
  const Path2D gt = geo::gt_ground_path(scenario.gt);
  auto [gt_eval, pred_eval] =
      prepare_pair(scenario, gt, pred, cfg, horizon_s);
  return score_pair(scenario.id, gt_eval, pred_eval, cfg, used_horizon);
}

ScenarioEvaluation evaluate_scenario(const Scenario& scenario,
                                     const Trajectory& pred,
                                     const MetricConfig& cfg,
                                     const EvalOptions& options) {
  const double used_horizon =
      options.horizon_s > 0.0 ? options.horizon_s : scenario.duration_s;
  const Path2D gt = geo::gt_ground_path(scenario.gt);
  try {
    auto [pred2d, info] =
        geo::decode_to_world_2d(pred, scenario.gt, options.decode);
    auto [gt_eval, pred_eval] =
        prepare_pair(scenario, gt, pred2d, cfg, options.horizon_s);
    return {score_pair(scenario.id, gt_eval, pred_eval, cfg, used_horizon),
            info};
  } catch (const NearZeroDisplacement&) {
    // Static or collapsed prediction: score it against a prediction that
    // never leaves the ground-truth start. SE and AC follow from their
    // definitions with no further special-casing.
    const Path2D gt_eval =
        prepare_pair(scenario, gt, gt, cfg, options.horizon_s).first;
    std::vector<Eigen::Vector2d> pinned(
        static_cast<std::size_t>(cfg.n_eval), gt_eval.points().front());
    const Path2D pred_eval(std::move(pinned), ScaleStatus::recovered);
    geo::DecodeInfo info;
    info.convention = options.decode.convention;
    info.anchor_k = options.decode.anchor_k == geo::kAnchorLast
                        ? static_cast<int>(pred.size()) - 1
                        : options.decode.anchor_k;
    info.lambda = 0.0;
    info.degenerate = true;
    return {score_pair(scenario.id, gt_eval, pred_eval, cfg, used_horizon),
            info};
  } catch (const Error& e) {
    throw Error("scenario \"" + scenario.id + "\": " + e.what());
  }
}

}  // namespace tb::metrics
