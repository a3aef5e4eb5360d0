#pragma once

#include <utility>
#include <vector>

#include "trajbench/types.hpp"

namespace tb::geo {

// Anchor selector meaning "use the last frame".
inline constexpr int kAnchorLast = -1;

// Displacement below this is treated as a static/collapsed prediction.
inline constexpr double kEpsScale = 1e-6;

// Smallest displacement accepted as a heading.
inline constexpr double kMinHeadingDisp = 1e-3;

// Record of one scale recovery: lambda = d_real / d_pred.
struct ScaleRecovery {
  double lambda = 1.0;
  int anchor_frame_k = 0;
  double d_pred = 0.0;  // pre-scaling, arbitrary units
  double d_real = 0.0;  // meters
};

// Camera centers per pose convention:
//   camera_to_world  center = translation
//   world_to_camera  center = -R^T * translation
std::vector<Eigen::Vector3d> camera_centers(const Trajectory& traj,
                                            PoseConvention convention);

// Camera forward direction (+z of the camera frame) in the stored frame.
Eigen::Vector3d optical_axis(const Pose& pose, PoseConvention convention);

// Ground-truth position interpolated at normalized index progress u in [0,1].
Eigen::Vector3d gt_position_at_progress(const Trajectory& gt, double u);

// Multiplies every point by the single scalar lambda = d_real / d_pred,
// where d_pred is the displacement between the first and the anchor point
// and d_real is the ground-truth displacement between the frames that
// correspond to them under the normalized index-progress mapping.
// Throws NearZeroDisplacement when d_pred <= kEpsScale.
std::pair<std::vector<Eigen::Vector3d>, ScaleRecovery> recover_scale(
    const std::vector<Eigen::Vector3d>& pred, const Trajectory& gt,
    int anchor_k = kAnchorLast);

// Ground-plane heading of the trajectory start: the first displacement of at
// least kMinHeadingDisp, else the first pose's optical axis projected to the
// ground plane. Throws UndefinedHeading when neither yields a direction.
Eigen::Vector2d initial_heading(const Trajectory& traj,
                                PoseConvention convention);

// Rigid transform (rotation about the world vertical + translation) that
// maps pred's first point onto gt's first point and pred's initial
// ground-plane optical-axis direction onto gt's initial heading. No scaling,
// no non-vertical rotation. Falls back to pred's first displacement when the
// optical axis has no ground-plane component.
std::vector<Eigen::Vector3d> align_to_gt_start(
    const std::vector<Eigen::Vector3d>& pred,
    const Eigen::Vector3d& pred_initial_axis, const Trajectory& gt);

// Drops the vertical coordinate (world z-up), preserving order.
Path2D project_ground_plane(const std::vector<Eigen::Vector3d>& points,
                            ScaleStatus scale);

// Linear interpolation at n uniformly spaced normalized-index positions;
// endpoints preserved exactly, idempotent at fixed n.
Path2D resample(const Path2D& path, int n);

// Cuts both trajectories at normalized progress horizon_s / full_s (by index
// fraction), then resamples each to n_eval points.
std::pair<Path2D, Path2D> truncate_horizon(const Path2D& gt,
                                           const Path2D& pred,
                                           double horizon_s, double full_s,
                                           int n_eval);

struct DecodeOptions {
  PoseConvention convention = PoseConvention::camera_to_world;
  int anchor_k = kAnchorLast;
};

struct DecodeInfo {
  double lambda = 1.0;
  int anchor_k = 0;
  PoseConvention convention = PoseConvention::camera_to_world;
  bool degenerate = false;  // scale recovery hit NearZeroDisplacement
};

// Ground-truth robot path on the ground plane (centers with z dropped).
Path2D gt_ground_path(const Trajectory& gt);

// Full decode chain: centers -> scale recovery (arbitrary-scale inputs
// only) -> start/heading alignment -> ground-plane projection.
// NearZeroDisplacement propagates to the caller.
std::pair<Path2D, DecodeInfo> decode_to_world_2d(const Trajectory& pred,
                                                 const Trajectory& gt,
                                                 const DecodeOptions& options);

}  // namespace tb::geo
