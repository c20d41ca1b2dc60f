#include "hising/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "hising/errors.hpp"
#include "hising/optimizer.hpp"
#include "hising/rng.hpp"

namespace hising {

namespace {

constexpr std::uint64_t kSaltGraph = 1;
constexpr std::uint64_t kSaltCovariates = 2;
constexpr std::uint64_t kSaltTruth = 3;
constexpr std::uint64_t kSaltSample = 4;

using EdgeMap = std::map<std::vector<VertexId>, double>;

void add_edge(EdgeMap& edges, std::vector<VertexId> verts, double w) {
  if (w == 0.0) return;
  std::sort(verts.begin(), verts.end());
  edges.emplace(std::move(verts), w);  // duplicates keep the first weight
}

EdgeMap make_pairwise_ring(int n, double w) {
  EdgeMap edges;
  for (VertexId i = 0; i < n; ++i)
    add_edge(edges, {i, static_cast<VertexId>((i + 1) % n)}, w);
  return edges;
}

EdgeMap make_uniform_rounds(int n, int m, int rounds, double w_abs,
                            Xoshiro256pp& rng) {
  EdgeMap edges;
  std::vector<VertexId> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int r = 0; r < rounds; ++r) {
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[static_cast<size_t>(i)],
                perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    for (int start = 0; start + m <= n; start += m) {
      std::vector<VertexId> verts(perm.begin() + start, perm.begin() + start + m);
      const double sign = (rng() & 1) ? 1.0 : -1.0;
      add_edge(edges, std::move(verts), sign * w_abs);
    }
  }
  return edges;
}

EdgeMap make_group_blocks(int n, int m, double w_block, double w_ring) {
  EdgeMap edges;
  for (int start = 0; start + m <= n; start += m) {
    std::vector<VertexId> verts(static_cast<size_t>(m));
    std::iota(verts.begin(), verts.end(), static_cast<VertexId>(start));
    add_edge(edges, std::move(verts), w_block);
  }
  for (VertexId i = 0; i < n; ++i)
    add_edge(edges, {i, static_cast<VertexId>((i + 1) % n)}, w_ring);
  return edges;
}

WeightedHypergraph build_graph(const ExperimentSpec& spec, int n,
                               Xoshiro256pp& rng) {
  EdgeMap edges;
  const double scale = spec.weight_scale * spec.degree_cap;
  switch (spec.family) {
    case Family::pairwise:
      edges = make_pairwise_ring(n, 0.5 * scale);
      break;
    case Family::random_uniform_m:
      edges = make_uniform_rounds(n, spec.m, spec.uniform_rounds,
                                  scale / spec.uniform_rounds, rng);
      break;
    case Family::group_blocks:
      edges = make_group_blocks(n, spec.m, 0.5 * scale, 0.25 * scale);
      break;
  }
  std::vector<Hyperedge> list;
  list.reserve(edges.size());
  for (auto& [verts, w] : edges) list.push_back({verts, w});
  return WeightedHypergraph(n, spec.m, std::move(list))
      .normalize_degrees(spec.degree_cap);
}

CovariateMatrix draw_covariates(const ExperimentSpec& spec, int n,
                                Xoshiro256pp& rng) {
  const double radius = spec.truth_box.covariate_bound;
  for (int attempt = 0; attempt < spec.covariate_retries; ++attempt) {
    Eigen::MatrixXd x(n, spec.d);
    for (int i = 0; i < n; ++i) {
      double norm = 0.0;
      do {
        for (int k = 0; k < spec.d; ++k) x(i, k) = rng.normal();
        norm = x.row(i).norm();
      } while (norm < 1e-12);
      x.row(i) *= radius / norm;
    }
    CovariateMatrix cov(std::move(x));
    if (n >= spec.d &&
        covariance_spectrum(cov).lambda_min >= spec.lambda_min_target)
      return cov;
  }
  throw GenerationFailed(
      "generate_instance: covariance eigenvalue target unreachable");
}

ModelParameters draw_truth(const ExperimentSpec& spec, Xoshiro256pp& rng) {
  if (spec.truth_draw == TruthDraw::fixed) return spec.fixed_truth;
  // Uniform over the box shrunk to 80% radius: beta uniform on the
  // interval, theta uniform in the d-ball.
  ModelParameters p;
  p.beta = (2.0 * rng.uniform01() - 1.0) * 0.8 * spec.truth_box.beta_bound;
  Eigen::VectorXd dir(spec.d);
  double norm = 0.0;
  do {
    for (int k = 0; k < spec.d; ++k) dir[k] = rng.normal();
    norm = dir.norm();
  } while (norm < 1e-12);
  const double radius = 0.8 * spec.truth_box.theta_bound *
                        std::pow(rng.uniform01(), 1.0 / spec.d);
  p.theta = dir * (radius / norm);
  return p;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys,
                 double* intercept) {
  const size_t k = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < k; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = k * sxx - sx * sx;
  const double slope = (k * sxy - sx * sy) / denom;
  if (intercept) *intercept = (sy - slope * sx) / k;
  return slope;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t k = v.size();
  return (k % 2) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

void ExperimentSpec::validate() const {
  if (n_values.empty()) throw InvalidInput("experiment: n_values empty");
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 2) throw InvalidInput("experiment: n must be >= 2");
    if (i > 0 && n_values[i] <= n_values[i - 1])
      throw InvalidInput("experiment: n_values must be strictly increasing");
  }
  if (d < 1) throw InvalidInput("experiment: d must be >= 1");
  if (m < 2) throw InvalidInput("experiment: m must be >= 2");
  if (family == Family::pairwise && m != 2)
    throw InvalidInput("experiment: the pairwise family requires m = 2");
  if (trials_per_n < 1) throw InvalidInput("experiment: trials_per_n must be >= 1");
  truth_box.validate();
  if (truth_draw == TruthDraw::fixed) {
    if (fixed_truth.theta.size() != d)
      throw InvalidInput("experiment: fixed truth dimension != d");
    if (std::abs(fixed_truth.beta) > truth_box.beta_bound ||
        fixed_truth.theta.norm() > truth_box.theta_bound)
      throw InvalidInput("experiment: fixed truth outside the box");
  }
  if (burn_in_sweeps < 0) throw InvalidInput("experiment: burn-in must be >= 0");
  if (degree_cap <= 0.0) throw InvalidInput("experiment: degree cap must be > 0");
  if (weight_scale < 0.0 || weight_scale > 1.0)
    throw InvalidInput("experiment: weight_scale must lie in [0, 1]");
  if (uniform_rounds < 1) throw InvalidInput("experiment: rounds must be >= 1");
  if (mass_floor < 0.0) throw InvalidInput("experiment: mass floor must be >= 0");
  if (covariate_retries < 1)
    throw InvalidInput("experiment: retry budget must be >= 1");
  if (slope_min > slope_max) throw InvalidInput("experiment: empty slope window");
  if (threads < 0) throw InvalidInput("experiment: threads must be >= 0");
}

std::uint64_t cell_seed(std::uint64_t master_seed, int n, int trial) {
  return derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(n)),
                     static_cast<std::uint64_t>(trial));
}

GeneratedInstance generate_instance(const ExperimentSpec& spec, int n,
                                    std::uint64_t seed) {
  spec.validate();
  if (n < spec.m)
    throw InvalidInput("generate_instance: n smaller than edge cardinality");
  Xoshiro256pp graph_rng(derive_seed(seed, kSaltGraph));
  Xoshiro256pp cov_rng(derive_seed(seed, kSaltCovariates));
  Xoshiro256pp truth_rng(derive_seed(seed, kSaltTruth));
  return GeneratedInstance{build_graph(spec, n, graph_rng),
                           draw_covariates(spec, n, cov_rng),
                           draw_truth(spec, truth_rng)};
}

namespace {

SweepRow run_cell(const ExperimentSpec& spec, int n, int trial) {
  SweepRow row;
  row.n = n;
  row.trial = trial;
  row.seed = cell_seed(spec.master_seed, n, trial);
  try {
    const GeneratedInstance inst = generate_instance(spec, n, row.seed);

    SpinConfiguration y = [&] {
      const std::uint64_t s = derive_seed(row.seed, kSaltSample);
      if (spec.sampler == SamplerKind::exact)
        return sample_exact(inst.g, inst.x, inst.truth, s, spec.exact_cap);
      return sample_glauber(inst.g, inst.x, inst.truth,
                            ChainConfig{s, spec.burn_in_sweeps, spec.scan});
    }();

    PgdConfig cfg;
    cfg.box = spec.truth_box;
    const EstimationReport est = estimate_mple(inst.g, inst.x, y, cfg);

    AssumptionThresholds thr;
    thr.degree_cap = spec.degree_cap;
    thr.mass_floor = spec.mass_floor;
    thr.lambda_floor = spec.lambda_floor;
    const AssumptionReport rep =
        validate_assumptions(inst.g, inst.x, spec.truth_box, &inst.truth, thr,
                             /*with_projection=*/false);

    Eigen::VectorXd diff(spec.d + 1);
    diff << est.estimate.theta - inst.truth.theta,
        est.estimate.beta - inst.truth.beta;
    row.error = diff.norm();
    row.iterations = est.iterations;
    row.grad_norm = est.final_grad_norm;
    row.converged = est.converged;
    row.degree_ok = rep.degree_ok;
    row.mass_ok = rep.mass_ok;
    row.spectrum_ok = rep.spectrum_ok;
    row.row_norm_ok = rep.row_norm_ok;
    row.box_ok = rep.box_ok.value_or(false);
    row.max_degree = rep.max_degree;
    row.mass_ratio = rep.mass_ratio;
    row.lambda_min_q = rep.lambda_min_q;
    row.included = rep.hard_ok() && std::isfinite(row.error);
  } catch (const std::exception& err) {
    row.error = std::numeric_limits<double>::quiet_NaN();
    row.included = false;
    row.note = err.what();
  }
  return row;
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const int per_n = spec.trials_per_n;
  const size_t total = spec.n_values.size() * static_cast<size_t>(per_n);

  SweepResult result;
  result.rows.resize(total);

  const unsigned hw = std::thread::hardware_concurrency();
  const int nthreads =
      spec.threads > 0 ? spec.threads : static_cast<int>(std::max(1u, hw));
  auto work = [&](size_t idx) {
    const int n = spec.n_values[idx / static_cast<size_t>(per_n)];
    const int trial = static_cast<int>(idx % static_cast<size_t>(per_n));
    result.rows[idx] = run_cell(spec, n, trial);
  };
  if (nthreads <= 1 || total == 1) {
    for (size_t idx = 0; idx < total; ++idx) work(idx);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (size_t idx = next.fetch_add(1); idx < total;
             idx = next.fetch_add(1))
          work(idx);
      });
    for (auto& th : pool) th.join();
  }

  // Per-n aggregates over included rows only; excluded rows stay visible
  // in `rows` with their notes.
  std::vector<double> log_n, log_err, iter_counts;
  for (size_t ni = 0; ni < spec.n_values.size(); ++ni) {
    NScaleStat stat;
    stat.n = spec.n_values[ni];
    std::vector<double> errors;
    for (int t = 0; t < per_n; ++t) {
      const SweepRow& row = result.rows[ni * static_cast<size_t>(per_n) +
                                        static_cast<size_t>(t)];
      if (!row.included) continue;
      ++stat.included;
      errors.push_back(row.error);
      stat.max_iterations = std::max(stat.max_iterations, row.iterations);
    }
    if (!errors.empty()) {
      stat.median_error = median(std::move(errors));
      if (stat.median_error > 0.0) {
        log_n.push_back(std::log(static_cast<double>(stat.n)));
        log_err.push_back(std::log(stat.median_error));
        iter_counts.push_back(static_cast<double>(stat.max_iterations));
      }
    }
    result.per_n.push_back(stat);
  }

  if (log_n.size() >= 2) {
    result.slope_available = true;
    result.slope = fit_slope(log_n, log_err, &result.intercept);
    result.iteration_slope = fit_slope(log_n, iter_counts, nullptr);
  }
  return result;
}

ModelParameters mle_oracle(const WeightedHypergraph& g, const CovariateMatrix& x,
                           const SpinConfiguration& y, const ParameterBox& box,
                           double grid_step, int cap) {
  box.validate();
  const int n = g.vertex_count();
  const int d = x.d();
  if (cap < 1 || cap > 20) throw InvalidInput("mle_oracle: cap must be in [1, 20]");
  if (n > cap) throw TooLarge("mle_oracle: instance exceeds enumeration cap");
  if (d > 2) throw InvalidInput("mle_oracle: grid search supports d <= 2 only");
  if (y.size() != n) throw InvalidInput("mle_oracle: sample length != vertex count");
  if (!(grid_step > 0.0)) throw InvalidInput("mle_oracle: grid step must be > 0");

  // Per-configuration sufficient statistics: s(y) = X^T y and f(y).
  const std::uint64_t total = std::uint64_t{1} << n;
  Eigen::MatrixXd stats(static_cast<Eigen::Index>(total), d + 1);
  for (std::uint64_t k = 0; k < total; ++k) {
    const SpinConfiguration cfg = SpinConfiguration::from_bits(n, k);
    Eigen::VectorXd yv(n);
    for (int i = 0; i < n; ++i) yv[i] = cfg[i];
    stats.row(static_cast<Eigen::Index>(k)).head(d) =
        (x.matrix().transpose() * yv).transpose();
    stats(static_cast<Eigen::Index>(k), d) = f_value(g, cfg);
  }
  Eigen::VectorXd obs(d + 1);
  {
    Eigen::VectorXd yv(n);
    for (int i = 0; i < n; ++i) yv[i] = y[i];
    obs.head(d) = x.matrix().transpose() * yv;
    obs[d] = f_value(g, y);
  }

  // Symmetric candidate lists 0, +step, -step, ... so the zero point wins
  // exact ties (the objective is scanned with strict improvement).
  const auto axis = [&](double bound) {
    std::vector<double> vals{0.0};
    for (int k = 1; k * grid_step <= bound + 1e-12; ++k) {
      vals.push_back(k * grid_step);
      vals.push_back(-k * grid_step);
    }
    return vals;
  };
  const std::vector<double> beta_axis = axis(box.beta_bound);
  const std::vector<double> theta_axis = axis(box.theta_bound);

  Eigen::VectorXd point(d + 1);
  Eigen::VectorXd logw(static_cast<Eigen::Index>(total));
  double best = -std::numeric_limits<double>::infinity();
  ModelParameters argmax = ModelParameters::zeros(d);

  std::vector<Eigen::VectorXd> theta_grid;
  if (d == 1) {
    for (double a : theta_axis) {
      Eigen::VectorXd t(1);
      t << a;
      theta_grid.push_back(t);
    }
  } else {
    for (double a : theta_axis)
      for (double b : theta_axis) {
        Eigen::VectorXd t(2);
        t << a, b;
        if (t.norm() <= box.theta_bound + 1e-12) theta_grid.push_back(t);
      }
  }

  for (const Eigen::VectorXd& theta : theta_grid) {
    point.head(d) = theta;
    for (double beta : beta_axis) {
      point[d] = beta;
      logw = stats * point;
      const double hi = logw.maxCoeff();
      const double log_z =
          hi + std::log((logw.array() - hi).exp().sum());
      const double ll = obs.dot(point) - log_z;
      if (ll > best) {
        best = ll;
        argmax.theta = theta;
        argmax.beta = beta;
      }
    }
  }
  return argmax;
}

}  // namespace hising
