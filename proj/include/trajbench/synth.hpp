#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "trajbench/metrics.hpp"
#include "trajbench/types.hpp"

namespace tb::synth {

// Deterministic random source: std::mt19937_64 (fully specified by the
// standard) with fixed output transforms, so sequences are identical across
// platforms and standard libraries.
//   uniform: (x >> 11) * 2^-53 mapped onto [lo, hi)
//   normal:  Box-Muller on two uniform draws
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  double normal(double mean, double stddev);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

enum class Shape { straight, arc, s_curve, stop_turn };
enum class DegradationKind {
  gaussian_noise,
  heading_bias,
  scale_error,
  early_stop,
  endpoint_overshoot,
  static_freeze
};

Shape shape_from_string(const std::string& s);
DegradationKind degradation_from_string(const std::string& s);
std::string to_string(Shape s);
std::string to_string(DegradationKind k);

// Magnitude units by kind; zero magnitude is always the identity corruption.
//   gaussian_noise      per-axis noise stddev, meters
//   heading_bias        rotation of the path about its start, radians
//   scale_error         scale ratio minus one (0.5 -> path scaled by 1.5)
//   early_stop          fraction of the path cut from the end (frames drop)
//   endpoint_overshoot  fraction of the path length continued past the end
//   static_freeze       fraction of the tail frozen in place (1 -> static)
struct DegradationSpec {
  DegradationKind kind = DegradationKind::gaussian_noise;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

// Constant-speed shape primitives, starting at the origin heading +x.
Path2D straight_line(double length_m, int n);
Path2D circular_arc(double radius_m, double sweep_rad, int n);  // sweep > 0 left
Path2D s_curve(double length_m, double sweep_rad, int n);
Path2D stop_turn(double length_m, int n, double dwell_fraction,
                 double turn_rad);

// Seeded ground-truth generator: shape parameters (initial heading, arc
// sweep, turn angle, dwell) are drawn deterministically from the seed; the
// arc length is exactly length_m.
Path2D gen_gt(Shape shape, double length_m, int n_points, std::uint64_t seed);

// Lifts a 2D metric path to 3D poses: z = 0, orientation = chord heading
// (camera looking along the direction of travel), timestamps from
// frame_rate.
Trajectory lift_to_poses(const Path2D& path, double frame_rate,
                         ScaleStatus scale, FrameOfReference frame);

// The corruption stage alone: 2D, metric, world frame.
Path2D apply_corruption(const Path2D& gt, const DegradationSpec& spec);

// Full degradation: corruption, then re-expression in a random
// reconstruction frame (rotation about the vertical + translation) with a
// random global scale drawn log-uniformly from [0.1, 10]. The wrap is what
// forces every downstream evaluation through scale recovery and alignment.
Trajectory degrade(const Path2D& gt, const DegradationSpec& spec,
                   double frame_rate = 25.0);

struct SweepRow {
  double magnitude = 0.0;
  int repeats = 0;
  double ade = 0.0;
  double fde = 0.0;
  double mr = 0.0;
  double se = 0.0;
  double ac = 0.0;
  double wo_mean = 0.0;
  double wo_stddev = 0.0;
};

// Mean metrics over `repeats` seeded scenarios per magnitude. Repeats share
// their random draws across magnitudes (paired comparisons), so the effect
// of the magnitude is isolated.
std::vector<SweepRow> sensitivity_sweep(Shape shape, DegradationKind kind,
                                        const std::vector<double>& magnitudes,
                                        int repeats, const MetricConfig& cfg,
                                        std::uint64_t base_seed);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace tb::synth
