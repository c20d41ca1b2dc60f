#pragma once

#include <functional>
#include <vector>

#include "hising/pseudolikelihood.hpp"

namespace hising {

struct PgdConfig {
  // Zero means "use the default": step 1/(M^2+1), tolerance 1/sqrt(n),
  // iteration cap max(1000, ceil(10 (M^2+1) ln(n) / curvature_guess)).
  double step_size = 0.0;
  double grad_tol = 0.0;
  int max_iters = 0;
  // Strong-concavity guess used only to size the default iteration cap.
  double curvature_guess = 0.1;
  ParameterBox box;
  bool record_trajectory = false;
};

struct TrajectoryPoint {
  int iteration = 0;
  double lpl_value = 0.0;
  double grad_norm = 0.0;
};

struct EstimationReport {
  ModelParameters estimate;
  int iterations = 0;  // gradient steps actually applied
  double final_grad_norm = 0.0;
  bool converged = false;  // grad_tol reached before the iteration cap
  std::vector<TrajectoryPoint> trajectory;  // filled when record_trajectory
};

// Clamp beta to [-B, B]; rescale theta radially onto the Theta ball.
// Idempotent; in-box inputs pass through unchanged.
ModelParameters project_box(const ModelParameters& p, const ParameterBox& box);

// Called once per visited iterate (including the initial point and the
// final one), before the corresponding gradient step.
using IterateObserver =
    std::function<void(int iteration, const ModelParameters& p,
                       double lpl_value, double grad_norm)>;

// Projected gradient ascent on LPL over the box:
//   p <- project_box(p + step * grad LPL(p))
// until the gradient norm drops to grad_tol or the cap is hit. Throws
// NonFinite if an iterate yields a non-finite value or gradient, and
// InvalidInput if init lies outside the box.
EstimationReport estimate_mple(const WeightedHypergraph& g,
                               const CovariateMatrix& x,
                               const SpinConfiguration& y, const PgdConfig& cfg,
                               const ModelParameters& init,
                               const IterateObserver& observer = {});

// Same, starting from theta = 0, beta = 0.
EstimationReport estimate_mple(const WeightedHypergraph& g,
                               const CovariateMatrix& x,
                               const SpinConfiguration& y, const PgdConfig& cfg,
                               const IterateObserver& observer = {});

}  // namespace hising
