#include "hising/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "hising/errors.hpp"

namespace hising {

ModelParameters project_box(const ModelParameters& p, const ParameterBox& box) {
  box.validate();
  if (!p.theta.allFinite() || !std::isfinite(p.beta))
    throw InvalidInput("project_box: non-finite parameters");
  ModelParameters out = p;
  out.beta = std::clamp(out.beta, -box.beta_bound, box.beta_bound);
  const double tnorm = out.theta.norm();
  if (tnorm > box.theta_bound) out.theta *= box.theta_bound / tnorm;
  return out;
}

EstimationReport estimate_mple(const WeightedHypergraph& g,
                               const CovariateMatrix& x,
                               const SpinConfiguration& y, const PgdConfig& cfg,
                               const ModelParameters& init,
                               const IterateObserver& observer) {
  cfg.box.validate();
  const int n = g.vertex_count();
  const double m_bound = cfg.box.covariate_bound;
  const double step = cfg.step_size > 0.0
                          ? cfg.step_size
                          : 1.0 / (m_bound * m_bound + 1.0);
  const double tol =
      cfg.grad_tol > 0.0 ? cfg.grad_tol : 1.0 / std::sqrt(static_cast<double>(n));
  int cap = cfg.max_iters;
  if (cap <= 0) {
    if (!(cfg.curvature_guess > 0.0))
      throw InvalidInput("pgd: curvature guess must be positive");
    const double sized = std::ceil(10.0 * (m_bound * m_bound + 1.0) *
                                   std::log(static_cast<double>(n)) /
                                   cfg.curvature_guess);
    cap = std::max(1000, static_cast<int>(sized));
  }
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(tol))
    throw InvalidInput("pgd: step size and tolerance must be positive");

  const double box_tol = 1e-12;
  if (std::abs(init.beta) > cfg.box.beta_bound + box_tol ||
      init.theta.norm() > cfg.box.theta_bound + box_tol)
    throw InvalidInput("pgd: init outside the box");

  const LplProblem prob(g, x, y);
  ModelParameters p = project_box(init, cfg.box);  // absorb roundoff at the rim

  EstimationReport report;
  for (int iter = 0;; ++iter) {
    const LplEvaluation eval = prob.value_and_gradient(p);
    const double gnorm = eval.gradient.norm();
    if (!std::isfinite(eval.value) || !std::isfinite(gnorm))
      throw NonFinite("pgd: non-finite objective or gradient");
    if (cfg.record_trajectory)
      report.trajectory.push_back({iter, eval.value, gnorm});
    if (observer) observer(iter, p, eval.value, gnorm);
    if (gnorm <= tol) {
      report.iterations = iter;
      report.final_grad_norm = gnorm;
      report.converged = true;
      break;
    }
    if (iter >= cap) {
      report.iterations = iter;
      report.final_grad_norm = gnorm;
      report.converged = false;
      break;
    }
    ModelParameters next = p;
    next.theta += step * eval.gradient.head(prob.d());
    next.beta += step * eval.gradient[prob.d()];
    p = project_box(next, cfg.box);
  }
  report.estimate = std::move(p);
  return report;
}

EstimationReport estimate_mple(const WeightedHypergraph& g,
                               const CovariateMatrix& x,
                               const SpinConfiguration& y, const PgdConfig& cfg,
                               const IterateObserver& observer) {
  return estimate_mple(g, x, y, cfg, ModelParameters::zeros(x.d()), observer);
}

}  // namespace hising
