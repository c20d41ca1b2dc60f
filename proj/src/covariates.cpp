#include "hising/covariates.hpp"

#include "hising/errors.hpp"

namespace hising {

CovariateMatrix::CovariateMatrix(Eigen::MatrixXd x) : x_(std::move(x)) {
  if (x_.rows() < 1 || x_.cols() < 1)
    throw InvalidInput("covariates: need at least one row and one column");
  if (!x_.allFinite()) throw InvalidInput("covariates: non-finite entry");
}

double CovariateMatrix::max_row_norm() const {
  return x_.rowwise().norm().maxCoeff();
}

CovarianceSpectrum covariance_spectrum(const CovariateMatrix& x) {
  if (x.n() < x.d())
    throw InvalidInput("covariance_spectrum: fewer rows than columns");
  const Eigen::MatrixXd q =
      (x.matrix().transpose() * x.matrix()) / static_cast<double>(x.n());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::EigenvaluesOnly);
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

ProjectionMatrix build_projection(const CovariateMatrix& x, double cond_tol) {
  if (cond_tol < 0.0) cond_tol = 1e-10;
  const Eigen::MatrixXd& mat = x.matrix();
  const Eigen::MatrixXd gram = mat.transpose() * mat;  // d x d
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo <= cond_tol * hi)
    throw IllConditioned("build_projection: X^T X numerically singular");

  ProjectionMatrix out;
  out.f = Eigen::MatrixXd::Identity(x.n(), x.n()) -
          mat * gram.ldlt().solve(mat.transpose());
  out.inf_norm = out.f.cwiseAbs().colwise().sum().maxCoeff();
  return out;
}

}  // namespace hising
