#include "trajbench/types.hpp"

#include <cmath>
#include <sstream>

namespace tb {

std::string to_string(ScaleStatus s) {
  switch (s) {
    case ScaleStatus::metric: return "metric";
    case ScaleStatus::arbitrary: return "arbitrary";
    case ScaleStatus::recovered: return "recovered";
  }
  return "?";
}

std::string to_string(TargetMode m) {
  return m == TargetMode::explicit_target ? "explicit" : "implicit";
}

std::string to_string(Split s) { return s == Split::train ? "train" : "eval"; }

std::string to_string(Aggregation a) {
  return a == Aggregation::per_scenario_mean ? "per_scenario_mean"
                                             : "aggregate_then_score";
}

std::string to_string(CoverageSemantics c) {
  return c == CoverageSemantics::exists ? "exists" : "nearest";
}

std::string to_string(PoseConvention c) {
  return c == PoseConvention::camera_to_world ? "camera_to_world"
                                              : "world_to_camera";
}

TargetMode target_mode_from_string(const std::string& s) {
  if (s == "explicit") return TargetMode::explicit_target;
  if (s == "implicit") return TargetMode::implicit_target;
  throw Error("unknown target_mode \"" + s + "\"");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "eval") return Split::eval;
  throw Error("unknown split \"" + s + "\"");
}

Pose::Pose(int t_index_, std::optional<double> timestamp_,
           const Eigen::Quaterniond& rotation_,
           const Eigen::Vector3d& translation_, std::optional<Fov> fov_)
    : t_index(t_index_),
      timestamp(timestamp_),
      rotation(rotation_),
      translation(translation_),
      fov(fov_) {
  if (t_index < 0) throw Error("pose t_index must be >= 0");
  if (!translation.allFinite()) throw Error("pose translation not finite");
  const double norm = rotation.norm();
  if (!(norm > 1e-12) || !std::isfinite(norm))
    throw Error("zero-norm quaternion");
  // Renormalize only when needed so exact unit quaternions pass through
  // unchanged (keeps file round trips bit-exact).
  if (std::abs(norm - 1.0) > 1e-12) rotation.coeffs() /= norm;
  if (std::abs(rotation.norm() - 1.0) > 1e-6)
    throw Error("quaternion normalization failed");
  // Canonical sign: w >= 0 (q and -q encode the same rotation).
  if (rotation.w() < 0.0 ||
      (rotation.w() == 0.0 &&
       (rotation.x() < 0.0 ||
        (rotation.x() == 0.0 &&
         (rotation.y() < 0.0 ||
          (rotation.y() == 0.0 && rotation.z() < 0.0)))))) {
    rotation.coeffs() = -rotation.coeffs();
  }
}

Trajectory::Trajectory(std::vector<Pose> poses, double frame_rate,
                       ScaleStatus scale, FrameOfReference frame)
    : poses_(std::move(poses)),
      frame_rate_(frame_rate),
      scale_(scale),
      frame_(frame) {
  if (poses_.size() < 2)
    throw Error("trajectory needs at least 2 poses, got " +
                std::to_string(poses_.size()));
  for (std::size_t i = 1; i < poses_.size(); ++i) {
    if (poses_[i].t_index <= poses_[i - 1].t_index)
      throw Error("trajectory t_index not strictly increasing at position " +
                  std::to_string(i));
  }
  if (frame_rate_ < 0.0 || !std::isfinite(frame_rate_))
    throw Error("trajectory frame_rate must be finite and >= 0");
}

double Trajectory::duration_s() const {
  if (poses_.front().timestamp && poses_.back().timestamp)
    return *poses_.back().timestamp - *poses_.front().timestamp;
  if (frame_rate_ > 0.0)
    return static_cast<double>(poses_.back().t_index -
                               poses_.front().t_index) /
           frame_rate_;
  return 0.0;
}

Path2D::Path2D(std::vector<Eigen::Vector2d> points, ScaleStatus scale)
    : points_(std::move(points)), scale_(scale) {
  if (points_.size() < 2)
    throw Error("2D trajectory needs at least 2 points, got " +
                std::to_string(points_.size()));
  if (scale_ == ScaleStatus::arbitrary)
    throw Error("2D trajectory must be metric or recovered, not arbitrary");
  for (const auto& p : points_)
    if (!p.allFinite()) throw Error("2D trajectory point not finite");
}

Scenario::Scenario(std::string id_, std::string category_, std::string prompt_,
                   TargetMode target_mode_, Split split_, Trajectory gt_,
                   double duration_s_)
    : id(std::move(id_)),
      category(std::move(category_)),
      prompt(std::move(prompt_)),
      target_mode(target_mode_),
      split(split_),
      gt(std::move(gt_)),
      duration_s(duration_s_) {
  if (id.empty()) throw Error("scenario id must not be empty");
  if (gt.scale_status() != ScaleStatus::metric)
    throw Error("scenario \"" + id + "\": ground truth must be metric");
  if (gt.frame_of_reference() != FrameOfReference::world)
    throw Error("scenario \"" + id + "\": ground truth must be world-frame");
  if (!(duration_s > 0.0))
    throw Error("scenario \"" + id + "\": duration_s must be > 0");
}

std::vector<std::string> config_violations(const MetricConfig& cfg) {
  std::vector<std::string> v;
  auto positive = [&](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
      v.push_back(std::string(name) + " must be > 0");
  };
  positive(cfg.tau_miss, "tau_miss");
  positive(cfg.sigma_se, "sigma_se");
  positive(cfg.sigma_min, "sigma_min");
  positive(cfg.sigma_max, "sigma_max");
  positive(cfg.beta, "beta");
  positive(cfg.gamma, "gamma");
  positive(cfg.tau_ade, "tau_ade");
  positive(cfg.tau_fde, "tau_fde");
  if (cfg.corridor_m < 2) v.push_back("corridor_m must be >= 2");
  if (cfg.n_eval < 2) v.push_back("n_eval must be >= 2");
  if (!(cfg.sigma_min < cfg.sigma_max))
    v.push_back("sigma_min < sigma_max violated");
  const double ws[] = {cfg.w_ade, cfg.w_fde, cfg.w_mr, cfg.w_seac};
  const char* wn[] = {"w_ade", "w_fde", "w_mr", "w_seac"};
  bool weights_finite = true;
  for (int i = 0; i < 4; ++i) {
    if (ws[i] < 0.0 || !std::isfinite(ws[i])) {
      v.push_back(std::string(wn[i]) + " must be >= 0");
      weights_finite = false;
    }
  }
  if (weights_finite) {
    const double sum = ((cfg.w_fde + cfg.w_mr) + (cfg.w_ade + cfg.w_seac));
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "weights sum " << sum << " != 1";
      v.push_back(os.str());
    }
  }
  return v;
}

const MetricConfig& validate_config(const MetricConfig& cfg) {
  const auto v = config_violations(cfg);
  if (!v.empty()) {
    std::string msg = "invalid config: ";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) msg += "; ";
      msg += v[i];
    }
    throw ConfigError(msg);
  }
  return cfg;
}

ScenarioResult::ScenarioResult(std::string scenario_id_, double ade_,
                               double fde_, double mr_, double se_, double ac_,
                               double wo_, double horizon_s_)
    : scenario_id(std::move(scenario_id_)),
      ade(ade_),
      fde(fde_),
      mr(mr_),
      se(se_),
      ac(ac_),
      wo(wo_),
      horizon_s(horizon_s_) {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!(ade >= 0.0) || !(fde >= 0.0))
    throw Error("scenario result: displacement errors must be >= 0");
  if (!(mr >= 0.0 && mr <= 100.0))
    throw Error("scenario result: mr must be in [0,100]");
  if (!in01(se) || !in01(ac) || !in01(wo))
    throw Error("scenario result: se/ac/wo must be in [0,1]");
}

}  // namespace tb
