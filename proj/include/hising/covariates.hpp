#pragma once

#include <Eigen/Dense>

namespace hising {

// Row-per-vertex covariate matrix X (n x d). Entries must be finite.
class CovariateMatrix {
 public:
  explicit CovariateMatrix(Eigen::MatrixXd x);

  int n() const { return static_cast<int>(x_.rows()); }
  int d() const { return static_cast<int>(x_.cols()); }
  const Eigen::MatrixXd& matrix() const { return x_; }
  auto row(int i) const { return x_.row(i); }

  // max_i ||x_i||_2, the empirical value of the row-norm bound M.
  double max_row_norm() const;

 private:
  Eigen::MatrixXd x_;
};

struct CovarianceSpectrum {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Extreme eigenvalues of Q = (1/n) X^T X.
CovarianceSpectrum covariance_spectrum(const CovariateMatrix& x);

struct ProjectionMatrix {
  Eigen::MatrixXd f;  // n x n, F = I - X (X^T X)^{-1} X^T
  // Maximum column absolute sum. (Column, not row: this matches the norm
  // convention used by the diagnostics bounds. F is symmetric anyway.)
  double inf_norm = 0.0;
};

// Orthogonal projection onto the complement of the column span of X.
// Throws IllConditioned when lambda_min(X^T X) <= cond_tol * lambda_max.
// cond_tol < 0 selects the default 1e-10.
ProjectionMatrix build_projection(const CovariateMatrix& x, double cond_tol = -1.0);

}  // namespace hising
