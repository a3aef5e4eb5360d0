#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "trajbench/geometry.hpp"
#include "trajbench/metrics.hpp"
#include "trajbench/synth.hpp"

#include <cmath>
#include <numbers>

using namespace tb;
using namespace tb::geo;

namespace {

constexpr double kPi = std::numbers::pi;

Pose make_pose(int i, const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
  return Pose(i, static_cast<double>(i) / 25.0, q, t);
}

Trajectory two_pose_traj(const Eigen::Quaterniond& q,
                         const Eigen::Vector3d& t0,
                         const Eigen::Vector3d& t1,
                         ScaleStatus scale = ScaleStatus::metric) {
  std::vector<Pose> poses = {make_pose(0, q, t0), make_pose(1, q, t1)};
  return Trajectory(poses, 25.0,
                    scale, scale == ScaleStatus::metric
                               ? FrameOfReference::world
                               : FrameOfReference::reconstruction);
}

Eigen::Quaterniond random_quat(synth::Rng& rng) {
  Eigen::Quaterniond q(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1),
                       rng.normal(0, 1));
  q.normalize();
  return q;
}

}  // namespace

TEST_CASE("camera centers per convention") {
  const Eigen::Vector3d t(1, 2, 3);
  const auto c2w = camera_centers(
      two_pose_traj(Eigen::Quaterniond::Identity(), t, t + t),
      PoseConvention::camera_to_world);
  CHECK(c2w[0].isApprox(t, 1e-15));
  const auto w2c = camera_centers(
      two_pose_traj(Eigen::Quaterniond::Identity(), t, t + t),
      PoseConvention::world_to_camera);
  CHECK(w2c[0].isApprox(-t, 1e-15));
}

TEST_CASE("the two encodings of one camera agree on its center") {
  synth::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Quaterniond rot = random_quat(rng);
    const Eigen::Vector3d center(rng.normal(0, 5), rng.normal(0, 5),
                                 rng.normal(0, 5));
    // world_to_camera stores x_cam = R x_world + t with t = -R c.
    const Eigen::Vector3d t_w2c = -(rot * center);
    const auto a = camera_centers(two_pose_traj(rot.conjugate(), center,
                                                center * 2.0),
                                  PoseConvention::camera_to_world);
    const auto b = camera_centers(two_pose_traj(rot, t_w2c, t_w2c * 2.0),
                                  PoseConvention::world_to_camera);
    CHECK((a[0] - b[0]).norm() < 1e-12);
  }
}

TEST_CASE("optical axis per convention") {
  const Eigen::Quaterniond yaw90(
      Eigen::AngleAxisd(kPi / 2.0, Eigen::Vector3d::UnitZ()));
  const Pose p = make_pose(0, yaw90, Eigen::Vector3d::Zero());
  // Yaw leaves +z in place for camera_to_world.
  CHECK(optical_axis(p, PoseConvention::camera_to_world)
            .isApprox(Eigen::Vector3d::UnitZ(), 1e-12));
  CHECK(optical_axis(p, PoseConvention::world_to_camera)
            .isApprox(Eigen::Vector3d::UnitZ(), 1e-12));
}

TEST_CASE("scale factor is the displacement ratio") {
  const Trajectory gt = two_pose_traj(Eigen::Quaterniond::Identity(),
                                      {0, 0, 0}, {4, 0, 0});
  const std::vector<Eigen::Vector3d> pred = {{0, 0, 0}, {2, 0, 0}};
  const auto [scaled, rec] = recover_scale(pred, gt);
  CHECK(rec.lambda == 2.0);
  CHECK(rec.d_pred == 2.0);
  CHECK(rec.d_real == 4.0);
  CHECK(rec.anchor_frame_k == 1);
  CHECK(scaled[1].x() == 4.0);
}

TEST_CASE("near-zero displacement raises its own error type") {
  const Trajectory gt = two_pose_traj(Eigen::Quaterniond::Identity(),
                                      {0, 0, 0}, {4, 0, 0});
  const std::vector<Eigen::Vector3d> pred = {{1, 1, 1}, {1, 1, 1}};
  CHECK_THROWS_AS(recover_scale(pred, gt), NearZeroDisplacement);
}

TEST_CASE("recover_scale undoes a known global scale") {
  synth::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Path2D path = synth::gen_gt(synth::Shape::s_curve, 6.0, 80,
                                      1000 + trial);
    const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                               FrameOfReference::world);
    const double lambda0 = std::exp(rng.uniform(std::log(0.1), std::log(10)));
    std::vector<Eigen::Vector3d> pred;
    for (const auto& p : path.points())
      pred.emplace_back(lambda0 * p.x(), lambda0 * p.y(), 0.0);
    const auto [scaled, rec] = recover_scale(pred, gt);
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      const Eigen::Vector3d expect(path.points()[i].x(), path.points()[i].y(),
                                   0.0);
      CHECK((scaled[i] - expect).norm() < 1e-9);
    }
  }
}

TEST_CASE("recover_scale preserves pairwise distance ratios") {
  const Path2D path = synth::gen_gt(synth::Shape::arc, 5.0, 40, 99);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  std::vector<Eigen::Vector3d> pred;
  for (const auto& p : path.points())
    pred.emplace_back(3.7 * p.x() + 1.0, 3.7 * p.y() - 2.0, 0.5);
  const auto [scaled, rec] = recover_scale(pred, gt);
  const double r0 = (pred[10] - pred[3]).norm() / (pred[30] - pred[17]).norm();
  const double r1 =
      (scaled[10] - scaled[3]).norm() / (scaled[30] - scaled[17]).norm();
  CHECK(std::abs(r0 - r1) / r0 < 1e-12);
}

TEST_CASE("anchor selection is validated") {
  const Trajectory gt = two_pose_traj(Eigen::Quaterniond::Identity(),
                                      {0, 0, 0}, {4, 0, 0});
  const std::vector<Eigen::Vector3d> pred = {{0, 0, 0}, {1, 0, 0},
                                             {2, 0, 0}};
  CHECK(recover_scale(pred, gt, 1).second.anchor_frame_k == 1);
  CHECK_THROWS_AS(recover_scale(pred, gt, 0), Error);
  CHECK_THROWS_AS(recover_scale(pred, gt, 3), Error);
}

TEST_CASE("alignment: already aligned input is untouched") {
  const Path2D path = synth::gen_gt(synth::Shape::straight, 5.0, 50, 3);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  const auto centers = camera_centers(gt, PoseConvention::camera_to_world);
  const Eigen::Vector3d axis =
      optical_axis(gt.poses().front(), PoseConvention::camera_to_world);
  const auto aligned = align_to_gt_start(centers, axis, gt);
  for (std::size_t i = 0; i < centers.size(); ++i)
    CHECK((aligned[i] - centers[i]).norm() < 1e-12);
}

TEST_CASE("alignment: translation offset is removed exactly") {
  const Path2D path = synth::gen_gt(synth::Shape::arc, 5.0, 50, 4);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  auto centers = camera_centers(gt, PoseConvention::camera_to_world);
  const Eigen::Vector3d axis =
      optical_axis(gt.poses().front(), PoseConvention::camera_to_world);
  for (auto& c : centers) c += Eigen::Vector3d(5, 5, 0);
  const auto aligned = align_to_gt_start(centers, axis, gt);
  CHECK((aligned.front() - gt.poses().front().translation).norm() == 0.0);
}

TEST_CASE("alignment: a 90 degree heading error is rotated away") {
  const Path2D path = synth::gen_gt(synth::Shape::straight, 5.0, 50, 5);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  const auto centers = camera_centers(gt, PoseConvention::camera_to_world);
  const Eigen::AngleAxisd yaw(kPi / 2.0, Eigen::Vector3d::UnitZ());
  std::vector<Eigen::Vector3d> rotated;
  for (const auto& c : centers) rotated.push_back(yaw * c);
  const Eigen::Vector3d axis =
      yaw * optical_axis(gt.poses().front(), PoseConvention::camera_to_world);

  const auto aligned = align_to_gt_start(rotated, axis, gt);
  const Eigen::Vector2d gt_heading =
      initial_heading(gt, PoseConvention::camera_to_world);
  Eigen::Vector2d aligned_heading(aligned[1].x() - aligned[0].x(),
                                  aligned[1].y() - aligned[0].y());
  aligned_heading.normalize();
  const double angle = std::atan2(aligned_heading.x() * gt_heading.y() -
                                      aligned_heading.y() * gt_heading.x(),
                                  aligned_heading.dot(gt_heading));
  CHECK(std::abs(angle) < 1e-9);
}

TEST_CASE("alignment is an isometry") {
  synth::Rng rng(31);
  const Path2D path = synth::gen_gt(synth::Shape::s_curve, 5.0, 60, 6);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  std::vector<Eigen::Vector3d> pred;
  for (const auto& p : path.points())
    pred.emplace_back(p.x() + rng.normal(0, 1), p.y() + rng.normal(0, 1),
                      rng.normal(0, 0.1));
  const auto aligned =
      align_to_gt_start(pred, Eigen::Vector3d(1, 0, 0), gt);
  for (int trial = 0; trial < 100; ++trial) {
    const auto i = static_cast<std::size_t>(rng.uniform(0, 59.999));
    const auto j = static_cast<std::size_t>(rng.uniform(0, 59.999));
    CHECK(std::abs((pred[i] - pred[j]).norm() -
                   (aligned[i] - aligned[j]).norm()) < 1e-9);
  }
}

TEST_CASE("undefined heading is reported") {
  // Static positions and a straight-down optical axis: no heading anywhere.
  const Eigen::Quaterniond down(Eigen::AngleAxisd(
      kPi, Eigen::Vector3d::UnitX()));  // +z camera maps to -z world
  std::vector<Pose> poses = {make_pose(0, down, {0, 0, 0}),
                             make_pose(1, down, {0, 0, 0})};
  const Trajectory gt(poses, 25.0, ScaleStatus::metric,
                      FrameOfReference::world);
  CHECK_THROWS_AS(initial_heading(gt, PoseConvention::camera_to_world),
                  UndefinedHeading);
}

TEST_CASE("ground-plane projection drops z") {
  const std::vector<Eigen::Vector3d> pts = {{1, 2, 3}, {4, 5, 6}};
  const auto path = project_ground_plane(pts, ScaleStatus::metric);
  CHECK(path.points()[0] == Eigen::Vector2d(1, 2));
  CHECK(path.points()[1] == Eigen::Vector2d(4, 5));
}

TEST_CASE("projection is an isometry on level trajectories") {
  const Path2D flat = synth::gen_gt(synth::Shape::arc, 5.0, 30, 8);
  std::vector<Eigen::Vector3d> lifted;
  for (const auto& p : flat.points()) lifted.emplace_back(p.x(), p.y(), 1.25);
  const auto back = project_ground_plane(lifted, ScaleStatus::metric);
  for (std::size_t i = 1; i < flat.size(); ++i) {
    const double d3 = (lifted[i] - lifted[i - 1]).norm();
    const double d2 = (back.points()[i] - back.points()[i - 1]).norm();
    CHECK(std::abs(d3 - d2) < 1e-15);
  }
}

TEST_CASE("a helix projects to its circle") {
  std::vector<Eigen::Vector3d> helix;
  const double radius = 2.5;
  for (int i = 0; i < 200; ++i) {
    const double t = 4.0 * kPi * i / 199.0;
    helix.emplace_back(radius * std::cos(t), radius * std::sin(t), 0.3 * t);
  }
  const auto path = project_ground_plane(helix, ScaleStatus::metric);
  for (const auto& p : path.points())
    CHECK(std::abs(p.norm() - radius) < 1e-9);
}

TEST_CASE("resample: straight segment midpoints") {
  const Path2D seg({{0, 0}, {10, 0}}, ScaleStatus::metric);
  const auto out = resample(seg, 3);
  REQUIRE(out.size() == 3);
  CHECK(out.points()[0] == Eigen::Vector2d(0, 0));
  CHECK(out.points()[1] == Eigen::Vector2d(5, 0));
  CHECK(out.points()[2] == Eigen::Vector2d(10, 0));
}

TEST_CASE("resample to the original length is the identity") {
  const Path2D path = synth::gen_gt(synth::Shape::s_curve, 5.0, 77, 9);
  const auto out = resample(path, 77);
  REQUIRE(out.size() == path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(out.points()[i].x() == path.points()[i].x());
    CHECK(out.points()[i].y() == path.points()[i].y());
  }
}

TEST_CASE("resample is idempotent at fixed n") {
  const Path2D path = synth::gen_gt(synth::Shape::arc, 5.0, 121, 10);
  const auto once = resample(path, 50);
  const auto twice = resample(once, 50);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice.points()[i].x() == once.points()[i].x());
    CHECK(twice.points()[i].y() == once.points()[i].y());
  }
}

TEST_CASE("resample refinement stays close on smooth curves") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Path2D path = synth::gen_gt(synth::Shape::s_curve, 10.0, 257,
                                      500 + seed);
    const auto direct = resample(path, 100);
    const auto refined = resample(resample(path, 1000), 100);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
      worst = std::max(
          worst, (direct.points()[i] - refined.points()[i]).norm());
    CHECK(worst < 10.0 / 500.0);
  }
}

TEST_CASE("resample rejects n < 2") {
  const Path2D seg({{0, 0}, {1, 0}}, ScaleStatus::metric);
  CHECK_THROWS_AS(resample(seg, 1), Error);
}

TEST_CASE("horizon truncation cuts by progress") {
  const Path2D gt = synth::straight_line(8.0, 201);  // constant speed
  const Path2D pred = synth::straight_line(8.0, 201);
  auto [gt_h, pred_h] = truncate_horizon(gt, pred, 4.0, 8.0, 100);
  CHECK(gt_h.size() == 100);
  CHECK(gt_h.points().back().x() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(pred_h.points().back().x() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("full horizon equals a plain resample") {
  const Path2D gt = synth::gen_gt(synth::Shape::arc, 5.0, 121, 12);
  auto [gt_h, pred_h] = truncate_horizon(gt, gt, 8.0, 8.0, 100);
  const auto plain = resample(gt, 100);
  for (std::size_t i = 0; i < plain.size(); ++i)
    CHECK((gt_h.points()[i] - plain.points()[i]).norm() == 0.0);
}

TEST_CASE("horizon beyond the scenario duration is an error") {
  const Path2D gt = synth::straight_line(8.0, 10);
  CHECK_THROWS_AS(truncate_horizon(gt, gt, 9.0, 8.0, 100), Error);
  CHECK_THROWS_AS(truncate_horizon(gt, gt, 0.0, 8.0, 100), Error);
}

TEST_CASE("decode chain handles world-to-camera input exactly") {
  const Path2D path = synth::gen_gt(synth::Shape::arc, 5.0, 121, 43);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  // Re-encode every pose as world-to-camera: R' = R^-1, t' = -R^-1 c.
  std::vector<Pose> inverted;
  for (const auto& p : gt.poses()) {
    const Eigen::Quaterniond rot = p.rotation.conjugate();
    inverted.emplace_back(p.t_index, p.timestamp, rot,
                          -(rot * p.translation), p.fov);
  }
  const Trajectory w2c(inverted, 25.0, ScaleStatus::metric,
                       FrameOfReference::world);
  DecodeOptions options;
  options.convention = PoseConvention::world_to_camera;
  const auto [pred2d, info] = decode_to_world_2d(w2c, gt, options);
  const auto gt2d = gt_ground_path(gt);
  double worst = 0.0;
  for (std::size_t i = 0; i < gt2d.size(); ++i)
    worst =
        std::max(worst, (pred2d.points()[i] - gt2d.points()[i]).norm());
  CHECK(worst < 1e-9);
}

TEST_CASE("any anchor frame recovers a uniform wrap exactly") {
  const Path2D path = synth::gen_gt(synth::Shape::s_curve, 5.0, 121, 44);
  const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                             FrameOfReference::world);
  const Trajectory pred = synth::degrade(
      path, synth::DegradationSpec{synth::DegradationKind::gaussian_noise,
                                   0.0, 5151});
  for (int anchor : {1, 17, 60, 120, kAnchorLast}) {
    DecodeOptions options;
    options.anchor_k = anchor;
    const auto [pred2d, info] = decode_to_world_2d(pred, gt, options);
    const auto gt2d = gt_ground_path(gt);
    double worst = 0.0;
    for (std::size_t i = 0; i < gt2d.size(); ++i)
      worst =
          std::max(worst, (pred2d.points()[i] - gt2d.points()[i]).norm());
    CHECK(worst < 1e-9);
    CHECK(info.anchor_k == (anchor == kAnchorLast ? 120 : anchor));
  }
}

TEST_CASE("decode chain is exact on clean metric input") {
  for (auto shape : {synth::Shape::straight, synth::Shape::arc,
                     synth::Shape::s_curve, synth::Shape::stop_turn}) {
    const Path2D path = synth::gen_gt(shape, 5.0, 121, 42);
    const Trajectory gt = synth::lift_to_poses(path, 25.0, ScaleStatus::metric,
                                               FrameOfReference::world);
    const auto [pred2d, info] = decode_to_world_2d(gt, gt, {});
    CHECK(info.lambda == 1.0);
    const auto gt2d = gt_ground_path(gt);
    double worst = 0.0;
    for (std::size_t i = 0; i < gt2d.size(); ++i)
      worst = std::max(worst,
                       (pred2d.points()[i] - gt2d.points()[i]).norm());
    CHECK(worst < 1e-9);
  }
}
