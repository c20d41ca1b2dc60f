#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hising/covariates.hpp"
#include "hising/hypergraph.hpp"

namespace hising {

// Configuration y in {-1, +1}^n.
class SpinConfiguration {
 public:
  explicit SpinConfiguration(std::vector<std::int8_t> spins);
  SpinConfiguration(int n, std::int8_t fill);

  // Bit i of `mask` set means y_i = +1. Requires n <= 63.
  static SpinConfiguration from_bits(int n, std::uint64_t mask);
  std::uint64_t to_bits() const;

  int size() const { return static_cast<int>(y_.size()); }
  int operator[](int i) const { return y_[static_cast<size_t>(i)]; }
  void flip(int i) { y_[static_cast<size_t>(i)] = static_cast<std::int8_t>(-y_[static_cast<size_t>(i)]); }
  void set(int i, int s);

  const std::vector<std::int8_t>& spins() const { return y_; }
  bool operator==(const SpinConfiguration&) const = default;

 private:
  std::vector<std::int8_t> y_;
};

struct ModelParameters {
  Eigen::VectorXd theta;  // d external-field coefficients
  double beta = 0.0;      // interaction strength

  static ModelParameters zeros(int d) {
    return {Eigen::VectorXd::Zero(d), 0.0};
  }
};

// Feasible region: |beta| <= beta_bound, ||theta||_2 <= theta_bound.
// covariate_bound is the row-norm cap M that the box is calibrated to.
struct ParameterBox {
  double beta_bound = 0.0;
  double theta_bound = 0.0;
  double covariate_bound = 0.0;

  void validate() const;  // all three must be positive and finite
};

// ln cosh(z) without overflow: |z| + log1p(exp(-2|z|)) - ln 2.
inline double lncosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453;
}

// 1 / cosh(z)^2. Evaluated on |z| clamped to 700 so cosh stays finite;
// the square then underflows gracefully to 0 instead of producing inf.
inline double sech_sq(double z) {
  const double s = 1.0 / std::cosh(std::min(std::abs(z), 700.0));
  return s * s;
}

// Interaction term f(y) = sum_e w_e prod_{v in e} y_v.
double f_value(const WeightedHypergraph& g, const SpinConfiguration& y);

// Partial interaction f_i(y) = sum_{e: i in e} w_e prod_{v in e, v != i} y_v.
// Does not depend on y_i; f(y) differs by 2 w_e terms when y_i flips.
double f_partial(const WeightedHypergraph& g, const SpinConfiguration& y, int i);

// All partials at once, one pass over the edges.
Eigen::VectorXd interaction_fields(const WeightedHypergraph& g,
                                   const SpinConfiguration& y);

// Pr[y_i = s | y_{-i}] = 1 / (1 + exp(-2 (theta^T x_i + beta f_i(y)) s)).
double conditional_prob(const WeightedHypergraph& g, const CovariateMatrix& x,
                        const ModelParameters& p, const SpinConfiguration& y,
                        int i, int s);

// Unnormalized log-weight sum_i (theta^T x_i) y_i + beta f(y).
double log_weight(const WeightedHypergraph& g, const CovariateMatrix& x,
                  const ModelParameters& p, const SpinConfiguration& y);

inline constexpr int kEnumerationCap = 22;

// Log-weights of all 2^n configurations, indexed by spin bitmask (bit i set
// means y_i = +1). Gray-code sweep, O(2^n) flip updates instead of fresh
// evaluations. Throws TooLarge when n exceeds `cap`.
std::vector<double> enumerate_log_weights(const WeightedHypergraph& g,
                                          const CovariateMatrix& x,
                                          const ModelParameters& p,
                                          int cap = kEnumerationCap);

// ln sum_y exp(log_weight(y)) via the same sweep, max-shifted for stability.
double log_partition(const WeightedHypergraph& g, const CovariateMatrix& x,
                     const ModelParameters& p, int cap = kEnumerationCap);

}  // namespace hising
