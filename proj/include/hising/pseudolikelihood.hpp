#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hising/model.hpp"

namespace hising {

struct LplEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;  // (d/dtheta_1, ..., d/dtheta_d, d/dbeta)
  std::optional<double> neg_hessian_min_eig;
};

struct SandwichReport {
  bool lhs_ok = false;   // sech^2(B + M Theta) * C  <=  -H  (PSD order)
  bool rhs_ok = false;   // -H  <=  C, with C = (1/n) sum_i X_i X_i^T
  double lambda_min = 0.0;  // lambda_min(-H)
};

// Log-pseudolikelihood of the observed configuration,
//   LPL(theta, beta) = (1/n) sum_i [ y_i z_i - ln cosh(z_i) ] - ln 2,
// with z_i = theta^T x_i + beta f_i(y_{-i}).
//
// The augmented design [X | f] and the y vector depend only on (g, x, y),
// so one LplProblem serves every parameter value the optimizer visits.
class LplProblem {
 public:
  LplProblem(const WeightedHypergraph& g, const CovariateMatrix& x,
             const SpinConfiguration& y);

  int n() const { return static_cast<int>(xaug_.rows()); }
  int d() const { return static_cast<int>(xaug_.cols()) - 1; }

  double value(const ModelParameters& p) const;

  // Fused value + gradient: shares the per-vertex tanh evaluations.
  LplEvaluation value_and_gradient(const ModelParameters& p) const;

  // -H = (1/n) sum_i X_i X_i^T / cosh^2(z_i), X_i = (x_i^T, f_i)^T.
  Eigen::MatrixXd neg_hessian(const ModelParameters& p) const;

  // Interaction fields f_i(y_{-i}) of the observed configuration.
  Eigen::VectorXd fields() const { return xaug_.col(xaug_.cols() - 1); }

  // C = (1/n) sum_i X_i X_i^T, the cosh-free factor of both sandwich sides.
  Eigen::MatrixXd design_second_moment() const {
    return xaug_.transpose() * xaug_ / n();
  }

 private:
  Eigen::VectorXd field_vector(const ModelParameters& p) const;  // z

  Eigen::MatrixXd xaug_;  // n x (d+1), rows X_i = (x_i^T, f_i)
  Eigen::VectorXd y_;     // spins as doubles
};

double lpl(const WeightedHypergraph& g, const CovariateMatrix& x,
           const ModelParameters& p, const SpinConfiguration& y);

Eigen::VectorXd lpl_gradient(const WeightedHypergraph& g, const CovariateMatrix& x,
                             const ModelParameters& p, const SpinConfiguration& y);

Eigen::MatrixXd lpl_neg_hessian(const WeightedHypergraph& g,
                                const CovariateMatrix& x,
                                const ModelParameters& p,
                                const SpinConfiguration& y);

// Verifies sech^2(B + M Theta) * C <= -H <= C in the PSD order via
// lambda_min of the difference matrices (tolerance -1e-9). Requires p
// inside the box.
SandwichReport sandwich_check(const WeightedHypergraph& g, const CovariateMatrix& x,
                              const ModelParameters& p, const SpinConfiguration& y,
                              const ParameterBox& box);

}  // namespace hising
