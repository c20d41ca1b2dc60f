#include "hising/pseudolikelihood.hpp"

#include <algorithm>
#include <cmath>

#include "hising/errors.hpp"

namespace hising {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kFieldClamp = 700.0;  // tanh/cosh evaluated on clamped z

void check_params(const LplProblem& prob, const ModelParameters& p) {
  if (p.theta.size() != prob.d())
    throw InvalidInput("lpl: theta dimension != covariate columns");
  if (!p.theta.allFinite() || !std::isfinite(p.beta))
    throw InvalidInput("lpl: non-finite parameters");
}

Eigen::VectorXd stack(const ModelParameters& p) {
  Eigen::VectorXd v(p.theta.size() + 1);
  v << p.theta, p.beta;
  return v;
}

}  // namespace

LplProblem::LplProblem(const WeightedHypergraph& g, const CovariateMatrix& x,
                       const SpinConfiguration& y) {
  if (x.n() != g.vertex_count())
    throw InvalidInput("lpl: covariate rows != vertex count");
  if (y.size() != g.vertex_count())
    throw InvalidInput("lpl: spin configuration length != vertex count");
  const int n = g.vertex_count();
  const int d = x.d();
  xaug_.resize(n, d + 1);
  xaug_.leftCols(d) = x.matrix();
  xaug_.col(d) = interaction_fields(g, y);
  y_.resize(n);
  for (int i = 0; i < n; ++i) y_[i] = y[i];
}

Eigen::VectorXd LplProblem::field_vector(const ModelParameters& p) const {
  return xaug_ * stack(p);
}

double LplProblem::value(const ModelParameters& p) const {
  check_params(*this, p);
  const Eigen::VectorXd z = field_vector(p);
  double acc = 0.0;
  for (int i = 0; i < n(); ++i) acc += y_[i] * z[i] - lncosh(z[i]);
  return acc / n() - kLn2;
}

LplEvaluation LplProblem::value_and_gradient(const ModelParameters& p) const {
  check_params(*this, p);
  const Eigen::VectorXd z = field_vector(p);
  Eigen::VectorXd resid(n());
  double acc = 0.0;
  for (int i = 0; i < n(); ++i) {
    const double zc = std::clamp(z[i], -kFieldClamp, kFieldClamp);
    acc += y_[i] * z[i] - lncosh(z[i]);
    resid[i] = y_[i] - std::tanh(zc);
  }
  LplEvaluation out;
  out.value = acc / n() - kLn2;
  out.gradient = xaug_.transpose() * resid / n();
  return out;
}

Eigen::MatrixXd LplProblem::neg_hessian(const ModelParameters& p) const {
  check_params(*this, p);
  const Eigen::VectorXd z = field_vector(p);
  Eigen::VectorXd w(n());
  for (int i = 0; i < n(); ++i) w[i] = sech_sq(z[i]);
  return xaug_.transpose() * w.asDiagonal() * xaug_ / n();
}

double lpl(const WeightedHypergraph& g, const CovariateMatrix& x,
           const ModelParameters& p, const SpinConfiguration& y) {
  return LplProblem(g, x, y).value(p);
}

Eigen::VectorXd lpl_gradient(const WeightedHypergraph& g, const CovariateMatrix& x,
                             const ModelParameters& p, const SpinConfiguration& y) {
  return LplProblem(g, x, y).value_and_gradient(p).gradient;
}

Eigen::MatrixXd lpl_neg_hessian(const WeightedHypergraph& g,
                                const CovariateMatrix& x,
                                const ModelParameters& p,
                                const SpinConfiguration& y) {
  return LplProblem(g, x, y).neg_hessian(p);
}

SandwichReport sandwich_check(const WeightedHypergraph& g, const CovariateMatrix& x,
                              const ModelParameters& p, const SpinConfiguration& y,
                              const ParameterBox& box) {
  box.validate();
  const double box_tol = 1e-12;
  if (std::abs(p.beta) > box.beta_bound + box_tol ||
      p.theta.norm() > box.theta_bound + box_tol)
    throw InvalidInput("sandwich_check: parameters outside the box");

  const LplProblem prob(g, x, y);
  const Eigen::MatrixXd neg_h = prob.neg_hessian(p);
  const Eigen::MatrixXd cov = prob.design_second_moment();
  const double factor =
      sech_sq(box.beta_bound + box.covariate_bound * box.theta_bound);

  constexpr double kPsdTol = -1e-9;
  const auto min_eig = [](const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };

  SandwichReport rep;
  rep.lhs_ok = min_eig(neg_h - factor * cov) >= kPsdTol;
  rep.rhs_ok = min_eig(cov - neg_h) >= kPsdTol;
  rep.lambda_min = min_eig(neg_h);
  return rep;
}

}  // namespace hising
