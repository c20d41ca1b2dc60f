#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hising/covariates.hpp"
#include "hising/model.hpp"
#include "hising/sampler.hpp"

namespace hising {

struct AssumptionThresholds {
  double degree_cap = 1.0;     // max weighted vertex degree
  double mass_floor = 0.05;    // top_mass / n lower bound
  double lambda_floor = 1e-3;  // lambda_min((1/n) X^T X) lower bound
  double f_norm_warn = 4.0;    // ||F||_inf warning line (not a hard failure)
};

struct AssumptionReport {
  double max_degree = 0.0;
  bool degree_ok = false;
  double top_mass = 0.0;
  double mass_ratio = 0.0;  // top_mass / n
  bool mass_ok = false;
  double lambda_min_q = 0.0;
  double lambda_max_q = 0.0;
  bool spectrum_ok = false;
  double max_row_norm = 0.0;
  bool row_norm_ok = false;  // max ||x_i||_2 <= M
  std::optional<double> f_inf_norm;  // only when projection stats requested
  bool f_norm_ok = true;             // warning-level, never in hard_ok()
  std::optional<bool> box_ok;        // truth strictly inside the box

  bool hard_ok() const {
    return degree_ok && mass_ok && spectrum_ok && row_norm_ok &&
           box_ok.value_or(true);
  }
};

// Checks the standing assumptions and reports verdicts without throwing:
// bounded degree, top-cardinality edge mass, covariance spectrum, row
// norms, and (when `truth` is given) strict box membership. Projection
// stats cost O(n^2) memory, so they are opt-out for large sweeps.
AssumptionReport validate_assumptions(const WeightedHypergraph& g,
                                      const CovariateMatrix& x,
                                      const ParameterBox& box,
                                      const ModelParameters* truth = nullptr,
                                      const AssumptionThresholds& thr = {},
                                      bool with_projection = true);

// Pairwise reduction of the top-cardinality edge weights: column i holds
// the weights w_{(z*, i, j)} for the (m-2)-tuple z* whose weight vector
// over j has maximal l2 norm (ties: lexicographically smallest tuple).
struct ReductionMatrix {
  Eigen::MatrixXd a;  // n x n, zero diagonal
  std::vector<std::vector<VertexId>> chosen_tuples;  // empty when column is zero or m = 2
  double frobenius_sq = 0.0;
  double inf_norm = 0.0;  // max column absolute sum
  double one_norm = 0.0;  // max row absolute sum
};

// Throws NoTopEdges when no edge has cardinality m.
ReductionMatrix build_reduction_matrix(const WeightedHypergraph& g);

struct SelectionMap {
  std::vector<int> h;  // bijection [n] -> [n]
  double selected_sq_sum = 0.0;  // sum_i w(i, h(i))^2 over the input matrix
};

// Greedy one-per-row/column selection: repeatedly take the remaining row
// of largest l2 norm, pair it with its largest remaining |entry|, then
// zero that row and column. Ties break to the smallest index.
SelectionMap index_selection(const Eigen::MatrixXd& w);

// Certified strong-concavity mass:
//   (e^{-(B + M Theta)(m-1)} / 2^{m-1}) * sum_i (FA)^2_{i, h(i)}
// with h = index_selection(F A). Propagates IllConditioned / NoTopEdges.
double concavity_lower_bound(const WeightedHypergraph& g,
                             const CovariateMatrix& x, const ParameterBox& box,
                             double cond_tol = -1.0);

// Monte-Carlo sampling options shared by the verify_* routines.
struct McOptions {
  int trials = 1000;
  std::uint64_t seed = 0;
  bool exact = true;  // exact table sampler when n <= exact_cap, else Glauber
  int exact_cap = kEnumerationCap;
  int burn_in_sweeps = 200;
  ScanOrder scan = ScanOrder::sequential;
};

struct GradientVarianceReport {
  double empirical_beta_var = 0.0;   // mean of (n dLPL/dbeta)^2 at truth
  double bound_beta = 0.0;           // (12 + 4B)(m-1) n
  double empirical_theta_var = 0.0;  // mean of sum_k (n dLPL/dtheta_k)^2
  double bound_theta = 0.0;          // (1 + B) 4 M^2 (m-1) d n
  int trials = 0;
  bool exact = false;  // sampling route actually used
};

GradientVarianceReport verify_gradient_variance(const WeightedHypergraph& g,
                                                const CovariateMatrix& x,
                                                const ModelParameters& truth,
                                                const ParameterBox& box,
                                                const McOptions& opts);

struct EnergyBoundReport {
  double empirical_min_ff = 0.0;  // min over samples of ||F f(y)||_2^2
  double fraction_above = 0.0;    // share of samples with ||Ff||^2 >= bound
  double bound = 0.0;             // concavity_lower_bound value
  int trials = 0;
  bool exact = false;
};

EnergyBoundReport verify_energy_lower_bound(const WeightedHypergraph& g,
                                            const CovariateMatrix& x,
                                            const ModelParameters& truth,
                                            const ParameterBox& box,
                                            const McOptions& opts,
                                            double cond_tol = -1.0);

struct ParityCheckReport {
  long long combos_checked = 0;
  long long violations = 0;  // margin below -1e-10
  double min_margin = std::numeric_limits<double>::infinity();  // min lhs - rhs
};

// Exact check of the conditional-energy inequality
//   E[(Ff)_i^2 | y_{-z_1..z_{m-1}}]
//     >= (e^{-(B + M Theta)(m-1)} / 2^{m-1}) (sum_j F_ij w_{j,z_1..z_{m-1}})^2
// over every vertex i, every (m-1)-tuple realized by a top edge, and every
// assignment of the conditioned spins, by full enumeration (needs n <= cap).
ParityCheckReport verify_parity_lemma(const WeightedHypergraph& g,
                                      const CovariateMatrix& x,
                                      const ModelParameters& truth,
                                      const ParameterBox& box, int cap = 16);

// Same inequality conditioned on all spins but one: for every top edge,
// every v in it and every (m-2)-tuple z from that edge,
//   E[(Ff)_i^2 | y_{-v}] >= same bound with tuple {v} union z.
ParityCheckReport verify_tower_property(const WeightedHypergraph& g,
                                        const CovariateMatrix& x,
                                        const ModelParameters& truth,
                                        const ParameterBox& box, int cap = 16);

}  // namespace hising
