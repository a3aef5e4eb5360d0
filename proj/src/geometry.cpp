#include "trajbench/geometry.hpp"

#include <cmath>
#include <sstream>

namespace tb::geo {

namespace {

// Interpolation position i * (n_out - 1 scaled) computed so that an
// integer-valued result is exact (keeps resample idempotent bit-for-bit).
Eigen::Vector2d sample_at(const std::vector<Eigen::Vector2d>& pts, double x) {
  const auto n = static_cast<std::ptrdiff_t>(pts.size());
  if (x <= 0.0) return pts.front();
  if (x >= static_cast<double>(n - 1)) return pts.back();
  auto idx = static_cast<std::ptrdiff_t>(std::floor(x));
  if (idx > n - 2) idx = n - 2;
  const double frac = x - static_cast<double>(idx);
  if (frac == 0.0) return pts[idx];
  return (1.0 - frac) * pts[idx] + frac * pts[idx + 1];
}

std::vector<Eigen::Vector2d> sample_prefix(
    const std::vector<Eigen::Vector2d>& pts, double fraction, int n) {
  const double span = fraction * static_cast<double>(pts.size() - 1);
  std::vector<Eigen::Vector2d> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x =
        static_cast<double>(i) * span / static_cast<double>(n - 1);
    out.push_back(sample_at(pts, x));
  }
  return out;
}

}  // namespace

std::vector<Eigen::Vector3d> camera_centers(const Trajectory& traj,
                                            PoseConvention convention) {
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(traj.size());
  for (const auto& p : traj.poses()) {
    if (convention == PoseConvention::camera_to_world)
      centers.push_back(p.translation);
    else
      centers.push_back(-(p.rotation.conjugate() * p.translation));
  }
  return centers;
}

Eigen::Vector3d optical_axis(const Pose& pose, PoseConvention convention) {
  const Eigen::Vector3d forward(0.0, 0.0, 1.0);
  if (convention == PoseConvention::camera_to_world)
    return pose.rotation * forward;
  return pose.rotation.conjugate() * forward;
}

Eigen::Vector3d gt_position_at_progress(const Trajectory& gt, double u) {
  const auto& poses = gt.poses();
  const auto n = static_cast<std::ptrdiff_t>(poses.size());
  if (u <= 0.0) return poses.front().translation;
  if (u >= 1.0) return poses.back().translation;
  const double x = u * static_cast<double>(n - 1);
  auto idx = static_cast<std::ptrdiff_t>(std::floor(x));
  if (idx > n - 2) idx = n - 2;
  const double frac = x - static_cast<double>(idx);
  return (1.0 - frac) * poses[idx].translation +
         frac * poses[idx + 1].translation;
}

std::pair<std::vector<Eigen::Vector3d>, ScaleRecovery> recover_scale(
    const std::vector<Eigen::Vector3d>& pred, const Trajectory& gt,
    int anchor_k) {
  if (pred.size() < 2) throw Error("recover_scale: need at least 2 points");
  const int last = static_cast<int>(pred.size()) - 1;
  const int k = anchor_k == kAnchorLast ? last : anchor_k;
  if (k < 1 || k > last)
    throw Error("recover_scale: anchor " + std::to_string(k) +
                " out of range [1, " + std::to_string(last) + "]");
  const double d_pred = (pred[k] - pred.front()).norm();
  if (d_pred <= kEpsScale) {
    std::ostringstream os;
    os << "near-zero displacement (" << d_pred << " <= " << kEpsScale
       << "): static or collapsed prediction";
    throw NearZeroDisplacement(os.str());
  }
  const double u = static_cast<double>(k) / static_cast<double>(last);
  const double d_real =
      (gt_position_at_progress(gt, u) - gt.poses().front().translation).norm();
  if (d_real <= 0.0)
    throw Error("recover_scale: ground truth displacement is zero");
  const double lambda = d_real / d_pred;
  std::vector<Eigen::Vector3d> scaled;
  scaled.reserve(pred.size());
  for (const auto& p : pred) scaled.push_back(lambda * p);
  return {std::move(scaled), ScaleRecovery{lambda, k, d_pred, d_real}};
}

namespace {

// Ground-plane direction of the first displacement >= kMinHeadingDisp,
// or a zero vector when there is none.
Eigen::Vector2d displacement_heading(const std::vector<Eigen::Vector3d>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Eigen::Vector3d d = pts[i] - pts.front();
    if (d.norm() >= kMinHeadingDisp) {
      const Eigen::Vector2d h(d.x(), d.y());
      if (h.norm() > 0.0) return h.normalized();
      return Eigen::Vector2d::Zero();  // purely vertical displacement
    }
  }
  return Eigen::Vector2d::Zero();
}

}  // namespace

Eigen::Vector2d initial_heading(const Trajectory& traj,
                                PoseConvention convention) {
  std::vector<Eigen::Vector3d> pts = camera_centers(traj, convention);
  Eigen::Vector2d h = displacement_heading(pts);
  if (h.norm() > 0.0) return h;
  const Eigen::Vector3d axis = optical_axis(traj.poses().front(), convention);
  const Eigen::Vector2d flat(axis.x(), axis.y());
  if (flat.norm() > 1e-9) return flat.normalized();
  throw UndefinedHeading(
      "no initial heading: displacement and orientation are both degenerate");
}

std::vector<Eigen::Vector3d> align_to_gt_start(
    const std::vector<Eigen::Vector3d>& pred,
    const Eigen::Vector3d& pred_initial_axis, const Trajectory& gt) {
  if (pred.size() < 2) throw Error("align_to_gt_start: need at least 2 points");
  const Eigen::Vector2d gt_heading =
      initial_heading(gt, PoseConvention::camera_to_world);

  Eigen::Vector2d pred_heading(pred_initial_axis.x(), pred_initial_axis.y());
  if (pred_heading.norm() > 1e-9) {
    pred_heading.normalize();
  } else {
    pred_heading = displacement_heading(pred);
    if (pred_heading.norm() == 0.0)
      throw UndefinedHeading(
          "no prediction heading: optical axis is vertical and displacement "
          "is degenerate");
  }

  const double angle =
      std::atan2(pred_heading.x() * gt_heading.y() -
                     pred_heading.y() * gt_heading.x(),
                 pred_heading.dot(gt_heading));
  const Eigen::Vector3d pivot = pred.front();
  const Eigen::Vector3d target = gt.poses().front().translation;
  if (angle == 0.0) {
    // Pure translation; keeps already-aligned inputs bit-exact.
    const Eigen::Vector3d shift = target - pivot;
    std::vector<Eigen::Vector3d> out;
    out.reserve(pred.size());
    for (const auto& p : pred) out.push_back(p + shift);
    return out;
  }
  const Eigen::AngleAxisd yaw(angle, Eigen::Vector3d::UnitZ());
  std::vector<Eigen::Vector3d> out;
  out.reserve(pred.size());
  for (const auto& p : pred) out.push_back(yaw * (p - pivot) + target);
  return out;
}

Path2D project_ground_plane(const std::vector<Eigen::Vector3d>& points,
                            ScaleStatus scale) {
  std::vector<Eigen::Vector2d> flat;
  flat.reserve(points.size());
  for (const auto& p : points) flat.emplace_back(p.x(), p.y());
  return Path2D(std::move(flat), scale);
}

Path2D resample(const Path2D& path, int n) {
  if (n < 2) throw Error("resample: n must be >= 2, got " + std::to_string(n));
  const auto& pts = path.points();
  std::vector<Eigen::Vector2d> out;
  out.reserve(n);
  const auto span = static_cast<double>(pts.size() - 1);
  for (int i = 0; i < n - 1; ++i) {
    const double x = static_cast<double>(i) * span / static_cast<double>(n - 1);
    out.push_back(sample_at(pts, x));
  }
  out.push_back(pts.back());
  return Path2D(std::move(out), path.scale_status());
}

std::pair<Path2D, Path2D> truncate_horizon(const Path2D& gt, const Path2D& pred,
                                           double horizon_s, double full_s,
                                           int n_eval) {
  if (!(horizon_s > 0.0))
    throw Error("truncate_horizon: horizon must be > 0");
  if (horizon_s > full_s) {
    std::ostringstream os;
    os << "truncate_horizon: horizon " << horizon_s
       << " s exceeds scenario duration " << full_s << " s";
    throw Error(os.str());
  }
  if (n_eval < 2) throw Error("truncate_horizon: n_eval must be >= 2");
  const double fraction = horizon_s / full_s;
  if (fraction == 1.0)
    return {resample(gt, n_eval), resample(pred, n_eval)};
  return {Path2D(sample_prefix(gt.points(), fraction, n_eval),
                 gt.scale_status()),
          Path2D(sample_prefix(pred.points(), fraction, n_eval),
                 pred.scale_status())};
}

Path2D gt_ground_path(const Trajectory& gt) {
  return project_ground_plane(
      camera_centers(gt, PoseConvention::camera_to_world),
      ScaleStatus::metric);
}

std::pair<Path2D, DecodeInfo> decode_to_world_2d(const Trajectory& pred,
                                                 const Trajectory& gt,
                                                 const DecodeOptions& options) {
  DecodeInfo info;
  info.convention = options.convention;
  std::vector<Eigen::Vector3d> centers =
      camera_centers(pred, options.convention);
  const Eigen::Vector3d axis =
      optical_axis(pred.poses().front(), options.convention);

  ScaleStatus scale = pred.scale_status();
  if (pred.scale_status() == ScaleStatus::arbitrary) {
    auto [scaled, recovery] = recover_scale(centers, gt, options.anchor_k);
    centers = std::move(scaled);
    info.lambda = recovery.lambda;
    info.anchor_k = recovery.anchor_frame_k;
    scale = ScaleStatus::recovered;
  } else {
    info.lambda = 1.0;
    info.anchor_k = options.anchor_k == kAnchorLast
                        ? static_cast<int>(pred.size()) - 1
                        : options.anchor_k;
  }

  const auto aligned = align_to_gt_start(centers, axis, gt);
  return {project_ground_plane(aligned, scale), info};
}

}  // namespace tb::geo
