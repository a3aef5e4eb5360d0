#pragma once

#include <string>
#include <vector>

#include "trajbench/geometry.hpp"
#include "trajbench/types.hpp"

namespace tb::metrics {

// Progress-dependent corridor around the ground truth: M reference points at
// uniform index positions, each with its own radius, largest at mid-progress.
struct CorridorSpec {
  std::vector<Eigen::Vector2d> reference_points;
  std::vector<double> radii;     // sigma_i, meters
  std::vector<double> progress;  // p_i = i / (M - 1)
};

// Mean pairwise L2 distance over equal-length trajectories.
double ade(const Path2D& pred, const Path2D& gt);

// Distance between the final positions.
double fde(const Path2D& pred, const Path2D& gt);

// Percentage of timesteps with pairwise distance strictly greater than tau.
double miss_rate(const Path2D& pred, const Path2D& gt, double tau);

// Gaussian penalty on the final-position distance: exp(-d^2 / (2 sigma^2)).
double soft_endpoint(const Path2D& pred, const Path2D& gt, double sigma);

// Corridor radius at normalized progress p:
// sigma_min + (sigma_max - sigma_min) * exp(-(p - 0.5)^2 / (2 beta^2)).
double corridor_radius(double p, const MetricConfig& cfg);

CorridorSpec build_corridor(const Path2D& gt, const MetricConfig& cfg);

// Fraction-covered penalty: 1 when every predicted point is covered, else
// exp(-gamma * (N_p - N_c) / N_p). Coverage semantics:
//   exists   covered iff some reference point has the point within its radius
//   nearest  covered iff the nearest reference point has it within its radius
double approach_consistency(const Path2D& pred, const CorridorSpec& corridor,
                            double gamma, CoverageSemantics semantics);

// w_ade * exp(-ADE/tau_ade) + w_fde * exp(-FDE/tau_fde)
//   + w_mr * (1 - MR/100) + w_seac * SE * AC.
// Rejects inputs outside their documented ranges.
double weighted_overall(double ade, double fde, double mr, double se,
                        double ac, const MetricConfig& cfg);

struct EvalOptions {
  geo::DecodeOptions decode;
  double horizon_s = 0.0;  // 0 = full scenario duration
};

struct ScenarioEvaluation {
  ScenarioResult result;
  geo::DecodeInfo decode;
};

// Scores an already-decoded 2D prediction against the scenario ground truth
// (both resampled to cfg.n_eval, optionally horizon-truncated first).
ScenarioResult evaluate_scenario(const Scenario& scenario, const Path2D& pred,
                                 const MetricConfig& cfg,
                                 double horizon_s = 0.0);

// Drives the full geometry chain on a raw 3D prediction, then scores it.
// A NearZeroDisplacement from scale recovery is not an error: the scenario
// is scored against a prediction pinned to the ground-truth start.
ScenarioEvaluation evaluate_scenario(const Scenario& scenario,
                                     const Trajectory& pred,
                                     const MetricConfig& cfg,
                                     const EvalOptions& options = {});

}  // namespace tb::metrics
