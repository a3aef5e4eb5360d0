#include "trajbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace tb::synth {

namespace {

constexpr double kPi = std::numbers::pi;

// Stream separator so corruption noise and frame wrapping draw from
// unrelated sequences under the same user seed.
constexpr std::uint64_t kFrameStream = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kShapeStream = 0xbf58476d1ce4e5b9ull;

std::vector<Eigen::Vector2d> rotate_about_origin(
    std::vector<Eigen::Vector2d> pts, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (auto& p : pts) p = Eigen::Vector2d(c * p.x() - s * p.y(),
                                          s * p.x() + c * p.y());
  return pts;
}

}  // namespace

double Rng::normal(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * kPi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return mean + stddev * r * std::cos(theta);
}

Shape shape_from_string(const std::string& s) {
  if (s == "straight") return Shape::straight;
  if (s == "arc") return Shape::arc;
  if (s == "s_curve") return Shape::s_curve;
  if (s == "stop_turn") return Shape::stop_turn;
  throw Error("unknown shape \"" + s + "\"");
}

DegradationKind degradation_from_string(const std::string& s) {
  if (s == "gaussian_noise") return DegradationKind::gaussian_noise;
  if (s == "heading_bias") return DegradationKind::heading_bias;
  if (s == "scale_error") return DegradationKind::scale_error;
  if (s == "early_stop") return DegradationKind::early_stop;
  if (s == "endpoint_overshoot") return DegradationKind::endpoint_overshoot;
  if (s == "static_freeze") return DegradationKind::static_freeze;
  throw Error("unknown degradation \"" + s + "\"");
}

std::string to_string(Shape s) {
  switch (s) {
    case Shape::straight: return "straight";
    case Shape::arc: return "arc";
    case Shape::s_curve: return "s_curve";
    case Shape::stop_turn: return "stop_turn";
  }
  return "?";
}

std::string to_string(DegradationKind k) {
  switch (k) {
    case DegradationKind::gaussian_noise: return "gaussian_noise";
    case DegradationKind::heading_bias: return "heading_bias";
    case DegradationKind::scale_error: return "scale_error";
    case DegradationKind::early_stop: return "early_stop";
    case DegradationKind::endpoint_overshoot: return "endpoint_overshoot";
    case DegradationKind::static_freeze: return "static_freeze";
  }
  return "?";
}

Path2D straight_line(double length_m, int n) {
  if (!(length_m > 0.0)) throw Error("straight_line: length must be > 0");
  if (n < 2) throw Error("straight_line: n must be >= 2");
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i)
    pts.emplace_back(length_m * static_cast<double>(i) /
                         static_cast<double>(n - 1),
                     0.0);
  return Path2D(std::move(pts), ScaleStatus::metric);
}

Path2D circular_arc(double radius_m, double sweep_rad, int n) {
  if (!(radius_m > 0.0)) throw Error("circular_arc: radius must be > 0");
  if (sweep_rad == 0.0) throw Error("circular_arc: sweep must be nonzero");
  if (n < 2) throw Error("circular_arc: n must be >= 2");
  const double sign = sweep_rad > 0.0 ? 1.0 : -1.0;
  const double sweep = std::abs(sweep_rad);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = sweep * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.emplace_back(radius_m * std::sin(a),
                     sign * radius_m * (1.0 - std::cos(a)));
  }
  return Path2D(std::move(pts), ScaleStatus::metric);
}

Path2D s_curve(double length_m, double sweep_rad, int n) {
  if (!(length_m > 0.0)) throw Error("s_curve: length must be > 0");
  if (!(sweep_rad > 0.0)) throw Error("s_curve: sweep must be > 0");
  if (n < 2) throw Error("s_curve: n must be >= 2");
  const double half = length_m / 2.0;
  const double radius = half / sweep_rad;
  // End state of the first (left-turning) arc.
  const Eigen::Vector2d mid(radius * std::sin(sweep_rad),
                            radius * (1.0 - std::cos(sweep_rad)));
  const double mid_heading = sweep_rad;
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s =
        length_m * static_cast<double>(i) / static_cast<double>(n - 1);
    if (s <= half) {
      const double a = s / radius;
      pts.emplace_back(radius * std::sin(a), radius * (1.0 - std::cos(a)));
    } else {
      // Second arc curves right, starting at mid with heading mid_heading.
      const double a = (s - half) / radius;
      const Eigen::Vector2d local(radius * std::sin(a),
                                  -radius * (1.0 - std::cos(a)));
      const double c = std::cos(mid_heading);
      const double sn = std::sin(mid_heading);
      pts.emplace_back(mid.x() + c * local.x() - sn * local.y(),
                       mid.y() + sn * local.x() + c * local.y());
    }
  }
  return Path2D(std::move(pts), ScaleStatus::metric);
}

Path2D stop_turn(double length_m, int n, double dwell_fraction,
                 double turn_rad) {
  if (!(length_m > 0.0)) throw Error("stop_turn: length must be > 0");
  if (n < 4) throw Error("stop_turn: n must be >= 4");
  if (!(dwell_fraction >= 0.0 && dwell_fraction < 1.0))
    throw Error("stop_turn: dwell_fraction must be in [0, 1)");
  if (!(turn_rad > 0.0)) throw Error("stop_turn: turn angle must be > 0");

  const double leg = 0.45 * length_m;   // straight before and after
  const double arc_len = 0.10 * length_m;
  const double radius = arc_len / turn_rad;
  // Position along the curve at arc length s.
  auto at = [&](double s) -> Eigen::Vector2d {
    if (s <= leg) return {s, 0.0};
    if (s <= leg + arc_len) {
      const double a = (s - leg) / radius;
      return {leg + radius * std::sin(a), radius * (1.0 - std::cos(a))};
    }
    const Eigen::Vector2d arc_end(leg + radius * std::sin(turn_rad),
                                  radius * (1.0 - std::cos(turn_rad)));
    const double rest = s - leg - arc_len;
    return {arc_end.x() + rest * std::cos(turn_rad),
            arc_end.y() + rest * std::sin(turn_rad)};
  };

  const int n_dwell = static_cast<int>(std::lround(dwell_fraction * n));
  const int n_move = std::max(2, n - n_dwell);
  // Dwell at the moving sample closest to the end of the first leg, so the
  // speed stays constant everywhere else.
  const int dwell_at = static_cast<int>(
      std::lround(0.45 * static_cast<double>(n_move - 1)));
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(n_move + n_dwell);
  for (int j = 0; j < n_move; ++j) {
    const double s =
        length_m * static_cast<double>(j) / static_cast<double>(n_move - 1);
    pts.push_back(at(s));
    if (j == dwell_at)
      for (int d = 0; d < n_dwell; ++d) pts.push_back(pts.back());
  }
  return Path2D(std::move(pts), ScaleStatus::metric);
}

Path2D gen_gt(Shape shape, double length_m, int n_points, std::uint64_t seed) {
  if (!(length_m > 0.0)) throw Error("gen_gt: length must be > 0");
  if (n_points < 2) throw Error("gen_gt: n_points must be >= 2");
  Rng rng(seed ^ kShapeStream);
  const double heading = rng.uniform(-kPi, kPi);
  std::vector<Eigen::Vector2d> pts;
  switch (shape) {
    case Shape::straight:
      pts = straight_line(length_m, n_points).points();
      break;
    case Shape::arc: {
      const double sweep = rng.uniform(0.9, 2.1);
      const double dir = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      pts = circular_arc(length_m / sweep, dir * sweep, n_points).points();
      break;
    }
    case Shape::s_curve: {
      const double sweep = rng.uniform(0.7, 1.3);
      pts = s_curve(length_m, sweep, n_points).points();
      break;
    }
    case Shape::stop_turn: {
      const double dwell = rng.uniform(0.15, 0.30);
      const double turn = rng.uniform(kPi / 3.0, 2.0 * kPi / 3.0);
      pts = stop_turn(length_m, n_points, dwell, turn).points();
      break;
    }
  }
  return Path2D(rotate_about_origin(std::move(pts), heading),
                ScaleStatus::metric);
}

namespace {

// Chord heading angles of a 2D path; zero-length chords reuse the previous
// heading (or the next one at the start).
std::vector<double> chord_headings(const std::vector<Eigen::Vector2d>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> headings(n, 0.0);
  double last = 0.0;
  bool have_last = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = std::min(i, n - 2);
    const Eigen::Vector2d d = pts[j + 1] - pts[j];
    if (d.norm() > 0.0) {
      last = std::atan2(d.y(), d.x());
      have_last = true;
    } else if (!have_last) {
      // Leading dwell: find the first real chord.
      for (std::size_t k = j + 1; k + 1 < n; ++k) {
        const Eigen::Vector2d dk = pts[k + 1] - pts[k];
        if (dk.norm() > 0.0) {
          last = std::atan2(dk.y(), dk.x());
          break;
        }
      }
      have_last = true;
    }
    headings[i] = last;
  }
  return headings;
}

// Camera-to-world rotation of a camera whose optical axis (+z camera) points
// along the world +x axis, with image rows pointing down (-z world).
const Eigen::Quaterniond& base_camera_rotation() {
  static const Eigen::Quaterniond q = [] {
    Eigen::Matrix3d m;
    // columns: camera x (right), y (down), z (forward) in world coordinates
    m << 0, 0, 1,
        -1, 0, 0,
         0, -1, 0;
    return Eigen::Quaterniond(m);
  }();
  return q;
}

struct CorruptedPath {
  std::vector<Eigen::Vector2d> points;
  std::vector<std::size_t> source_index;  // into the clean path
};

CorruptedPath corrupt(const std::vector<Eigen::Vector2d>& clean,
                      const DegradationSpec& spec) {
  if (!(spec.magnitude >= 0.0))
    throw Error("degradation magnitude must be >= 0");
  const std::size_t n = clean.size();
  CorruptedPath out;
  switch (spec.kind) {
    case DegradationKind::gaussian_noise: {
      Rng rng(spec.seed);
      out.points = clean;
      for (std::size_t i = 0; i < n; ++i) {
        out.points[i].x() += rng.normal(0.0, spec.magnitude);
        out.points[i].y() += rng.normal(0.0, spec.magnitude);
        out.source_index.push_back(i);
      }
      break;
    }
    case DegradationKind::heading_bias: {
      const double c = std::cos(spec.magnitude);
      const double s = std::sin(spec.magnitude);
      out.points.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d d = clean[i] - clean.front();
        out.points.push_back(clean.front() +
                             Eigen::Vector2d(c * d.x() - s * d.y(),
                                             s * d.x() + c * d.y()));
        out.source_index.push_back(i);
      }
      break;
    }
    case DegradationKind::scale_error: {
      const double ratio = 1.0 + spec.magnitude;
      out.points.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        out.points.push_back(clean.front() + ratio * (clean[i] - clean.front()));
        out.source_index.push_back(i);
      }
      break;
    }
    case DegradationKind::early_stop: {
      if (spec.magnitude >= 1.0)
        throw Error("early_stop magnitude must be < 1");
      // Truncate at the sample nearest the stop progress.
      const auto last_kept = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(
                 (1.0 - spec.magnitude) * static_cast<double>(n - 1))));
      for (std::size_t i = 0; i <= last_kept; ++i) {
        out.points.push_back(clean[i]);
        out.source_index.push_back(i);
      }
      break;
    }
    case DegradationKind::endpoint_overshoot: {
      const auto extra = static_cast<std::size_t>(
          std::lround(spec.magnitude * static_cast<double>(n - 1)));
      out.points = clean;
      for (std::size_t i = 0; i < n; ++i) out.source_index.push_back(i);
      Eigen::Vector2d step = clean[n - 1] - clean[n - 2];
      for (std::size_t j = n - 2; step.norm() == 0.0 && j > 0; --j)
        step = clean[j] - clean[j - 1];
      for (std::size_t j = 1; j <= extra; ++j) {
        out.points.push_back(clean.back() + static_cast<double>(j) * step);
        out.source_index.push_back(n - 1);
      }
      break;
    }
    case DegradationKind::static_freeze: {
      if (spec.magnitude > 1.0)
        throw Error("static_freeze magnitude must be <= 1");
      const auto freeze_at = static_cast<std::size_t>(
          std::lround((1.0 - spec.magnitude) * static_cast<double>(n - 1)));
      out.points.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = std::min(i, freeze_at);
        out.points.push_back(clean[src]);
        out.source_index.push_back(src);
      }
      break;
    }
  }
  return out;
}

}  // namespace

Trajectory lift_to_poses(const Path2D& path, double frame_rate,
                         ScaleStatus scale, FrameOfReference frame) {
  if (!(frame_rate > 0.0)) throw Error("lift_to_poses: frame_rate must be > 0");
  const auto& pts = path.points();
  const auto headings = chord_headings(pts);
  std::vector<Pose> poses;
  poses.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eigen::Quaterniond yaw(
        Eigen::AngleAxisd(headings[i], Eigen::Vector3d::UnitZ()));
    poses.emplace_back(static_cast<int>(i),
                       static_cast<double>(i) / frame_rate,
                       yaw * base_camera_rotation(),
                       Eigen::Vector3d(pts[i].x(), pts[i].y(), 0.0));
  }
  return Trajectory(std::move(poses), frame_rate, scale, frame);
}

Path2D apply_corruption(const Path2D& gt, const DegradationSpec& spec) {
  auto corrupted = corrupt(gt.points(), spec);
  return Path2D(std::move(corrupted.points), ScaleStatus::metric);
}

Trajectory degrade(const Path2D& gt, const DegradationSpec& spec,
                   double frame_rate) {
  if (!(frame_rate > 0.0)) throw Error("degrade: frame_rate must be > 0");
  const auto corrupted = corrupt(gt.points(), spec);
  const auto clean_headings = chord_headings(gt.points());

  Rng frame_rng(spec.seed ^ kFrameStream);
  const double yaw_angle = frame_rng.uniform(-kPi, kPi);
  const Eigen::Vector3d shift(frame_rng.uniform(-20.0, 20.0),
                              frame_rng.uniform(-20.0, 20.0),
                              frame_rng.uniform(-5.0, 5.0));
  const double scale =
      std::exp(frame_rng.uniform(std::log(0.1), std::log(10.0)));
  const Eigen::Quaterniond wrap(
      Eigen::AngleAxisd(yaw_angle, Eigen::Vector3d::UnitZ()));

  std::vector<Pose> poses;
  poses.reserve(corrupted.points.size());
  for (std::size_t i = 0; i < corrupted.points.size(); ++i) {
    const Eigen::Vector3d p(corrupted.points[i].x(), corrupted.points[i].y(),
                            0.0);
    // The camera keeps looking where the clean footage looked; only the
    // path itself is corrupted.
    const double heading = clean_headings[corrupted.source_index[i]];
    const Eigen::Quaterniond rot =
        wrap * Eigen::Quaterniond(
                   Eigen::AngleAxisd(heading, Eigen::Vector3d::UnitZ())) *
        base_camera_rotation();
    poses.emplace_back(static_cast<int>(i),
                       static_cast<double>(i) / frame_rate, rot,
                       scale * (wrap * p) + shift);
  }
  return Trajectory(std::move(poses), frame_rate, ScaleStatus::arbitrary,
                    FrameOfReference::reconstruction);
}

std::vector<SweepRow> sensitivity_sweep(Shape shape, DegradationKind kind,
                                        const std::vector<double>& magnitudes,
                                        int repeats, const MetricConfig& cfg,
                                        std::uint64_t base_seed) {
  if (magnitudes.size() < 2)
    throw Error("sensitivity_sweep: need at least 2 magnitudes");
  if (repeats < 1) throw Error("sensitivity_sweep: repeats must be >= 1");
  validate_config(cfg);

  constexpr double kLength = 5.0;
  constexpr int kPoints = 121;
  constexpr double kFrameRate = 25.0;

  std::vector<SweepRow> rows;
  rows.reserve(magnitudes.size());
  for (double magnitude : magnitudes) {
    std::vector<double> wos;
    SweepRow row;
    row.magnitude = magnitude;
    row.repeats = repeats;
    for (int r = 0; r < repeats; ++r) {
      const std::uint64_t seed_r = base_seed + 0x100000001ull * (r + 1);
      const Path2D gt = gen_gt(shape, kLength, kPoints, seed_r);
      const Scenario scenario(
          to_string(shape) + "_" + std::to_string(r), to_string(shape), "",
          TargetMode::explicit_target, Split::eval,
          lift_to_poses(gt, kFrameRate, ScaleStatus::metric,
                        FrameOfReference::world),
          static_cast<double>(kPoints - 1) / kFrameRate);
      const Trajectory pred =
          degrade(gt, DegradationSpec{kind, magnitude, seed_r}, kFrameRate);
      const auto eval = metrics::evaluate_scenario(scenario, pred, cfg);
      row.ade += eval.result.ade;
      row.fde += eval.result.fde;
      row.mr += eval.result.mr;
      row.se += eval.result.se;
      row.ac += eval.result.ac;
      wos.push_back(eval.result.wo);
    }
    const double inv = 1.0 / static_cast<double>(repeats);
    row.ade *= inv;
    row.fde *= inv;
    row.mr *= inv;
    row.se *= inv;
    row.ac *= inv;
    double mean = 0.0;
    for (double w : wos) mean += w;
    mean *= inv;
    double var = 0.0;
    for (double w : wos) var += (w - mean) * (w - mean);
    row.wo_mean = mean;
    row.wo_stddev = repeats > 1
                        ? std::sqrt(var / static_cast<double>(repeats - 1))
                        : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "magnitude,repeats,ade,fde,mr,se,ac,wo_mean,wo_stddev\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.6f,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.magnitude,
                  r.repeats, r.ade, r.fde, r.mr, r.se, r.ac, r.wo_mean,
                  r.wo_stddev);
    out += buf;
  }
  return out;
}

}  // namespace tb::synth
