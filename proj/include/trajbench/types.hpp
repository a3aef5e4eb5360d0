#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <string>
#include <vector>

#include "trajbench/error.hpp"

namespace tb {

// Units policy: distances in meters, angles in radians, time in seconds.

enum class ScaleStatus { metric, arbitrary, recovered };
enum class FrameOfReference { world, reconstruction };
// "explicit" / "eval" are reserved or awkward as bare identifiers.
enum class TargetMode { explicit_target, implicit_target };
enum class Split { train, eval };
enum class Aggregation { per_scenario_mean, aggregate_then_score };
enum class CoverageSemantics { exists, nearest };
enum class PoseConvention { camera_to_world, world_to_camera };

std::string to_string(ScaleStatus s);
std::string to_string(TargetMode m);
std::string to_string(Split s);
std::string to_string(Aggregation a);
std::string to_string(CoverageSemantics c);
std::string to_string(PoseConvention c);
TargetMode target_mode_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// Horizontal / vertical field of view, radians.
struct Fov {
  double horizontal = 0.0;
  double vertical = 0.0;
};

// One timestamped camera pose.
//
// The quaternion is brought to unit norm and canonical sign (w >= 0) on
// construction; already-normalized inputs pass through bit-exact so that
// serializer/parser round trips are identities. A zero-norm quaternion or a
// non-finite translation is rejected.
struct Pose {
  int t_index = 0;
  std::optional<double> timestamp;  // seconds
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::optional<Fov> fov;

  Pose() = default;
  Pose(int t_index, std::optional<double> timestamp,
       const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation,
       std::optional<Fov> fov = std::nullopt);
};

// Ordered 3D pose sequence with frame timing metadata.
// Invariants: length >= 2, strictly increasing t_index.
class Trajectory {
 public:
  Trajectory(std::vector<Pose> poses, double frame_rate, ScaleStatus scale,
             FrameOfReference frame);

  const std::vector<Pose>& poses() const { return poses_; }
  std::size_t size() const { return poses_.size(); }
  double frame_rate() const { return frame_rate_; }  // Hz; 0 when unknown
  ScaleStatus scale_status() const { return scale_; }
  FrameOfReference frame_of_reference() const { return frame_; }

  // Time span: from timestamps when present, else (n-1)/frame_rate.
  double duration_s() const;

 private:
  std::vector<Pose> poses_;
  double frame_rate_ = 0.0;
  ScaleStatus scale_ = ScaleStatus::metric;
  FrameOfReference frame_ = FrameOfReference::world;
};

// 2D evaluation trajectory: positions in meters, world frame, z dropped.
// Only metric or recovered scale is representable in 2D form.
class Path2D {
 public:
  Path2D(std::vector<Eigen::Vector2d> points, ScaleStatus scale);

  const std::vector<Eigen::Vector2d>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  ScaleStatus scale_status() const { return scale_; }

 private:
  std::vector<Eigen::Vector2d> points_;
  ScaleStatus scale_ = ScaleStatus::metric;
};

// One benchmark unit: ground truth plus its annotation.
struct Scenario {
  std::string id;
  std::string category;
  std::string prompt;
  TargetMode target_mode = TargetMode::explicit_target;
  Split split = Split::eval;
  Trajectory gt;  // metric, world frame
  double duration_s = 0.0;

  Scenario(std::string id, std::string category, std::string prompt,
           TargetMode target_mode, Split split, Trajectory gt,
           double duration_s);
};

// All tunable evaluation constants. Adjust freely (e.g. from CLI flags),
// then gate through validate_config() before use.
struct MetricConfig {
  double tau_miss = 2.0;   // miss-rate distance threshold, m
  double sigma_se = 0.6;   // soft-endpoint tolerance, m
  int corridor_m = 20;     // number of corridor reference points
  double sigma_min = 0.15; // smallest corridor radius, m
  double sigma_max = 0.5;  // largest corridor radius, m
  double beta = 0.25;      // corridor radius falloff width
  double gamma = 5.0;      // approach-consistency penalty rate
  double w_ade = 0.05;
  double w_fde = 0.10;
  double w_mr = 0.10;
  double w_seac = 0.75;
  double tau_ade = 1.0;    // ADE score scale, m
  double tau_fde = 1.0;    // FDE score scale, m
  int n_eval = 100;        // evaluation resample count
  Aggregation aggregation = Aggregation::per_scenario_mean;
  CoverageSemantics coverage = CoverageSemantics::exists;
};

// Every violated constraint, by name; empty when the config is valid.
std::vector<std::string> config_violations(const MetricConfig& cfg);

// Returns cfg iff all invariants hold; throws ConfigError listing every
// violation otherwise.
const MetricConfig& validate_config(const MetricConfig& cfg);

// Per-scenario metric vector.
// se, ac, wo in [0,1]; mr in [0,100] percent; ade, fde >= 0 meters.
struct ScenarioResult {
  std::string scenario_id;
  double ade = 0.0;
  double fde = 0.0;
  double mr = 0.0;
  double se = 1.0;
  double ac = 1.0;
  double wo = 1.0;
  double horizon_s = 0.0;

  ScenarioResult() = default;
  ScenarioResult(std::string scenario_id, double ade, double fde, double mr,
                 double se, double ac, double wo, double horizon_s);
};

}  // namespace tb
