#include "hising/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hising/errors.hpp"
#include "hising/pseudolikelihood.hpp"
#include "hising/rng.hpp"

namespace hising {

namespace {

constexpr double kDegreeTol = 1e-9;
constexpr double kViolationTol = 1e-10;

double box_factor(const ParameterBox& box, int m) {
  const double e = box.beta_bound + box.covariate_bound * box.theta_bound;
  return std::exp(-e * (m - 1)) / std::pow(2.0, m - 1);
}

void check_dims(const WeightedHypergraph& g, const CovariateMatrix& x) {
  if (x.n() != g.vertex_count())
    throw InvalidInput("diagnostics: covariate rows != vertex count");
}

// Draws `opts.trials` configurations at `truth` and feeds them to `use`.
// Exact inverse-CDF sampling when the instance is enumerable, otherwise a
// fresh Glauber chain per trial with a derived seed. Returns the route.
template <typename Fn>
bool sample_trials(const WeightedHypergraph& g, const CovariateMatrix& x,
                   const ModelParameters& truth, const McOptions& opts,
                   Fn&& use) {
  if (opts.trials < 1) throw InvalidInput("diagnostics: trials must be >= 1");
  const bool exact = opts.exact && g.vertex_count() <= opts.exact_cap;
  if (exact) {
    ExactSampler sampler(g, x, truth, opts.exact_cap);
    Xoshiro256pp rng(opts.seed);
    for (int t = 0; t < opts.trials; ++t) use(sampler.draw(rng));
  } else {
    for (int t = 0; t < opts.trials; ++t) {
      ChainConfig cfg{derive_seed(opts.seed, static_cast<std::uint64_t>(t)),
                      opts.burn_in_sweeps, opts.scan};
      use(sample_glauber(g, x, truth, cfg));
    }
  }
  return exact;
}

}  // namespace

AssumptionReport validate_assumptions(const WeightedHypergraph& g,
                                      const CovariateMatrix& x,
                                      const ParameterBox& box,
                                      const ModelParameters* truth,
                                      const AssumptionThresholds& thr,
                                      bool with_projection) {
  check_dims(g, x);
  box.validate();

  AssumptionReport rep;
  rep.max_degree = g.max_vertex_degree();
  rep.degree_ok = rep.max_degree <= thr.degree_cap + kDegreeTol;

  rep.top_mass = g.top_mass();
  rep.mass_ratio = rep.top_mass / g.vertex_count();
  rep.mass_ok = rep.mass_ratio >= thr.mass_floor;

  const CovarianceSpectrum spec = covariance_spectrum(x);
  rep.lambda_min_q = spec.lambda_min;
  rep.lambda_max_q = spec.lambda_max;
  // lambda_max(Q) <= M^2 always holds when the row norms do; checking it
  // against the box keeps the spectrum verdict self-consistent.
  rep.spectrum_ok =
      spec.lambda_min >= thr.lambda_floor &&
      spec.lambda_max <= box.covariate_bound * box.covariate_bound + kDegreeTol;

  rep.max_row_norm = x.max_row_norm();
  rep.row_norm_ok = rep.max_row_norm <= box.covariate_bound + kDegreeTol;

  if (with_projection) {
    try {
      rep.f_inf_norm = build_projection(x).inf_norm;
      rep.f_norm_ok = *rep.f_inf_norm <= thr.f_norm_warn;
    } catch (const IllConditioned&) {
      rep.f_norm_ok = false;  // spectrum_ok is already false in this case
    }
  }

  if (truth) {
    if (truth->theta.size() != x.d())
      throw InvalidInput("diagnostics: truth dimension != covariate columns");
    rep.box_ok = std::abs(truth->beta) < box.beta_bound &&
                 truth->theta.norm() < box.theta_bound;
  }
  return rep;
}

ReductionMatrix build_reduction_matrix(const WeightedHypergraph& g) {
  const int n = g.vertex_count();
  const int m = g.max_cardinality();

  bool any_top = false;
  for (const auto& e : g.edges())
    if (static_cast<int>(e.vertices.size()) == m) {
      any_top = true;
      break;
    }
  if (!any_top)
    throw NoTopEdges("build_reduction_matrix: no edge of cardinality m");

  ReductionMatrix red;
  red.a = Eigen::MatrixXd::Zero(n, n);
  red.chosen_tuples.resize(static_cast<size_t>(n));

  std::vector<EdgeId> top_at;
  for (VertexId i = 0; i < n; ++i) {
    top_at.clear();
    for (EdgeId e : g.edges_at(i))
      if (static_cast<int>(g.edge(e).vertices.size()) == m) top_at.push_back(e);
    if (top_at.empty()) continue;

    // Candidate (m-2)-tuples: drop one vertex from e \ {i} of each incident
    // top edge. Tuples not realized this way give all-zero weight vectors
    // and can never beat a realized one.
    std::set<std::vector<VertexId>> tuples;
    for (EdgeId e : top_at) {
      std::vector<VertexId> rest;
      for (VertexId v : g.edge(e).vertices)
        if (v != i) rest.push_back(v);
      for (size_t drop = 0; drop < rest.size(); ++drop) {
        std::vector<VertexId> t = rest;
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(drop));
        tuples.insert(std::move(t));
      }
    }

    // Iterating the set in lexicographic order with a strict comparison
    // implements the smallest-tuple tie-break.
    std::vector<std::pair<VertexId, double>> best_entries;
    double best_sq = -1.0;
    std::vector<VertexId> best_tuple;
    std::vector<std::pair<VertexId, double>> entries;
    for (const auto& t : tuples) {
      entries.clear();
      double sq = 0.0;
      for (EdgeId e : top_at) {
        const auto& verts = g.edge(e).vertices;
        if (!std::includes(verts.begin(), verts.end(), t.begin(), t.end()))
          continue;
        for (VertexId v : verts) {
          if (v == i) continue;
          if (std::binary_search(t.begin(), t.end(), v)) continue;
          entries.emplace_back(v, g.edge(e).weight);
          sq += g.edge(e).weight * g.edge(e).weight;
        }
      }
      if (sq > best_sq) {
        best_sq = sq;
        best_tuple = t;
        best_entries = entries;
      }
    }

    for (const auto& [j, w] : best_entries) red.a(j, i) = w;
    red.chosen_tuples[static_cast<size_t>(i)] = std::move(best_tuple);
  }

  red.frobenius_sq = red.a.squaredNorm();
  red.inf_norm = red.a.cwiseAbs().colwise().sum().maxCoeff();
  red.one_norm = red.a.cwiseAbs().rowwise().sum().maxCoeff();
  return red;
}

SelectionMap index_selection(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols())
    throw InvalidInput("index_selection: matrix must be square");
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd work = w;
  std::vector<char> row_done(static_cast<size_t>(n), 0);
  std::vector<char> col_done(static_cast<size_t>(n), 0);

  SelectionMap sel;
  sel.h.assign(static_cast<size_t>(n), -1);
  for (int t = 0; t < n; ++t) {
    int bi = -1;
    double bsq = -1.0;
    for (int i = 0; i < n; ++i) {
      if (row_done[static_cast<size_t>(i)]) continue;
      const double sq = work.row(i).squaredNorm();
      if (sq > bsq) {
        bsq = sq;
        bi = i;
      }
    }
    int bj = -1;
    double babs = -1.0;
    for (int j = 0; j < n; ++j) {
      if (col_done[static_cast<size_t>(j)]) continue;
      const double a = std::abs(work(bi, j));
      if (a > babs) {
        babs = a;
        bj = j;
      }
    }
    sel.h[static_cast<size_t>(bi)] = bj;
    sel.selected_sq_sum += w(bi, bj) * w(bi, bj);
    row_done[static_cast<size_t>(bi)] = 1;
    col_done[static_cast<size_t>(bj)] = 1;
    work.row(bi).setZero();
    work.col(bj).setZero();
  }
  return sel;
}

double concavity_lower_bound(const WeightedHypergraph& g,
                             const CovariateMatrix& x, const ParameterBox& box,
                             double cond_tol) {
  check_dims(g, x);
  box.validate();
  const ReductionMatrix red = build_reduction_matrix(g);
  const ProjectionMatrix proj = build_projection(x, cond_tol);
  const SelectionMap sel = index_selection(proj.f * red.a);
  return box_factor(box, g.max_cardinality()) * sel.selected_sq_sum;
}

GradientVarianceReport verify_gradient_variance(const WeightedHypergraph& g,
                                                const CovariateMatrix& x,
                                                const ModelParameters& truth,
                                                const ParameterBox& box,
                                                const McOptions& opts) {
  check_dims(g, x);
  box.validate();
  const int n = g.vertex_count();
  const int d = x.d();
  const int m = g.max_cardinality();

  double acc_beta = 0.0;
  double acc_theta = 0.0;
  const bool exact =
      sample_trials(g, x, truth, opts, [&](const SpinConfiguration& y) {
        const Eigen::VectorXd grad = lpl_gradient(g, x, truth, y) * n;
        acc_beta += grad[d] * grad[d];
        acc_theta += grad.head(d).squaredNorm();
      });

  GradientVarianceReport rep;
  rep.empirical_beta_var = acc_beta / opts.trials;
  rep.empirical_theta_var = acc_theta / opts.trials;
  const double b = box.beta_bound;
  const double mm = box.covariate_bound;
  rep.bound_beta = (12.0 + 4.0 * b) * (m - 1) * n;
  rep.bound_theta = (1.0 + b) * 4.0 * mm * mm * (m - 1) * d * n;
  rep.trials = opts.trials;
  rep.exact = exact;
  return rep;
}

EnergyBoundReport verify_energy_lower_bound(const WeightedHypergraph& g,
                                            const CovariateMatrix& x,
                                            const ModelParameters& truth,
                                            const ParameterBox& box,
                                            const McOptions& opts,
                                            double cond_tol) {
  check_dims(g, x);
  box.validate();
  // Without top edges the certified bound is vacuous, but the measured
  // energies (all zero when the graph is empty) are still meaningful.
  double bound = 0.0;
  try {
    bound = concavity_lower_bound(g, x, box, cond_tol);
  } catch (const NoTopEdges&) {
  }
  const Eigen::MatrixXd f = build_projection(x, cond_tol).f;

  double min_ff = std::numeric_limits<double>::infinity();
  int above = 0;
  const bool exact =
      sample_trials(g, x, truth, opts, [&](const SpinConfiguration& y) {
        const double ff = (f * interaction_fields(g, y)).squaredNorm();
        min_ff = std::min(min_ff, ff);
        if (ff >= bound) ++above;
      });

  EnergyBoundReport rep;
  rep.empirical_min_ff = min_ff;
  rep.fraction_above = static_cast<double>(above) / opts.trials;
  rep.bound = bound;
  rep.trials = opts.trials;
  rep.exact = exact;
  return rep;
}

namespace {

// Shared engine for the conditional-energy checks. For each stored check
// (an (m-1)-tuple giving the weight vector, and the subset of its spins
// to leave free), enumerates every assignment of the conditioned spins
// exactly and compares E[(Ff)_i^2 | conditioning] against the bound.
struct ConditionalCheck {
  std::uint64_t free_mask = 0;         // spins integrated over
  std::vector<VertexId> weight_tuple;  // the (m-1) vertices in the RHS weights
};

ParityCheckReport run_conditional_checks(const WeightedHypergraph& g,
                                         const CovariateMatrix& x,
                                         const ModelParameters& truth,
                                         const ParameterBox& box, int cap,
                                         const std::vector<ConditionalCheck>& checks) {
  const int n = g.vertex_count();
  if (cap < 1 || cap > 20)
    throw InvalidInput("diagnostics: enumeration cap must be in [1, 20]");
  if (n > cap)
    throw TooLarge("diagnostics: instance exceeds the enumeration cap");
  box.validate();

  const Eigen::MatrixXd f = build_projection(x).f;
  const std::vector<double> logw = enumerate_log_weights(g, x, truth, cap);
  const std::uint64_t total = std::uint64_t{1} << n;

  double shift = logw[0];
  for (double lw : logw) shift = std::max(shift, lw);
  std::vector<double> weight(total);
  for (std::uint64_t k = 0; k < total; ++k) weight[k] = std::exp(logw[k] - shift);

  // (Ff)_i^2 for every configuration and vertex.
  Eigen::MatrixXd ff_sq(static_cast<Eigen::Index>(total), n);
  for (std::uint64_t k = 0; k < total; ++k) {
    const SpinConfiguration y = SpinConfiguration::from_bits(n, k);
    ff_sq.row(static_cast<Eigen::Index>(k)) =
        (f * interaction_fields(g, y)).array().square().transpose();
  }

  const double factor = box_factor(box, g.max_cardinality());

  ParityCheckReport rep;
  Eigen::VectorXd wvec(n);
  for (const auto& check : checks) {
    // RHS weight vector: w of the edge (tuple + {j}), zero when absent
    // or when j lies inside the tuple.
    wvec.setZero();
    std::vector<VertexId> key(check.weight_tuple);
    key.push_back(0);
    for (VertexId j = 0; j < n; ++j) {
      if (std::find(check.weight_tuple.begin(), check.weight_tuple.end(), j) !=
          check.weight_tuple.end())
        continue;
      key.back() = j;
      if (auto e = g.find_edge(key)) wvec[j] = g.edge(*e).weight;
    }
    const Eigen::VectorXd rhs_lin = f * wvec;

    const std::uint64_t fm = check.free_mask;
    for (std::uint64_t base = 0; base < total; ++base) {
      if (base & fm) continue;  // enumerate one representative per class
      double wsum = 0.0;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
      std::uint64_t sub = fm;
      while (true) {
        const std::uint64_t k = base | sub;
        wsum += weight[k];
        acc += weight[k] * ff_sq.row(static_cast<Eigen::Index>(k)).transpose();
        if (sub == 0) break;
        sub = (sub - 1) & fm;
      }
      for (int i = 0; i < n; ++i) {
        const double lhs = acc[i] / wsum;
        const double rhs = factor * rhs_lin[i] * rhs_lin[i];
        const double margin = lhs - rhs;
        ++rep.combos_checked;
        if (margin < -kViolationTol) ++rep.violations;
        rep.min_margin = std::min(rep.min_margin, margin);
      }
    }
  }
  return rep;
}

std::uint64_t tuple_mask(const std::vector<VertexId>& t) {
  std::uint64_t mask = 0;
  for (VertexId v : t) mask |= std::uint64_t{1} << v;
  return mask;
}

}  // namespace

ParityCheckReport verify_parity_lemma(const WeightedHypergraph& g,
                                      const CovariateMatrix& x,
                                      const ModelParameters& truth,
                                      const ParameterBox& box, int cap) {
  check_dims(g, x);
  const int m = g.max_cardinality();

  // Every (m-1)-subset of a top edge, conditioning on everything else.
  std::set<std::vector<VertexId>> tuples;
  for (const auto& e : g.edges()) {
    if (static_cast<int>(e.vertices.size()) != m) continue;
    for (size_t drop = 0; drop < e.vertices.size(); ++drop) {
      std::vector<VertexId> t = e.vertices;
      t.erase(t.begin() + static_cast<std::ptrdiff_t>(drop));
      tuples.insert(std::move(t));
    }
  }

  std::vector<ConditionalCheck> checks;
  checks.reserve(tuples.size());
  for (const auto& t : tuples) checks.push_back({tuple_mask(t), t});
  return run_conditional_checks(g, x, truth, box, cap, checks);
}

ParityCheckReport verify_tower_property(const WeightedHypergraph& g,
                                        const CovariateMatrix& x,
                                        const ModelParameters& truth,
                                        const ParameterBox& box, int cap) {
  check_dims(g, x);
  const int m = g.max_cardinality();

  // Same weight tuples as above, but conditioned on all spins except one
  // chosen vertex v of the tuple.
  std::set<std::pair<VertexId, std::vector<VertexId>>> combos;
  for (const auto& e : g.edges()) {
    if (static_cast<int>(e.vertices.size()) != m) continue;
    for (size_t drop = 0; drop < e.vertices.size(); ++drop) {
      std::vector<VertexId> t = e.vertices;
      t.erase(t.begin() + static_cast<std::ptrdiff_t>(drop));
      for (VertexId v : t) combos.emplace(v, t);
    }
  }

  std::vector<ConditionalCheck> checks;
  checks.reserve(combos.size());
  for (const auto& [v, t] : combos)
    checks.push_back({std::uint64_t{1} << v, t});
  return run_conditional_checks(g, x, truth, box, cap, checks);
}

}  // namespace hising
