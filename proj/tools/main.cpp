// Command-line front end: sample, estimate, diagnose, experiment.
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hising/diagnostics.hpp"
#include "hising/errors.hpp"
#include "hising/experiments.hpp"
#include "hising/io.hpp"
#include "hising/optimizer.hpp"
#include "hising/rng.hpp"
#include "hising/sampler.hpp"

namespace {

using namespace hising;

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k) out += ',';
    out += fmt(v[k]);
  }
  return out;
}

// Key-value reports go to --out when given, else to stdout.
void emit_report(const KeyValues& kv, const std::string& out_path) {
  if (out_path.empty()) {
    for (const auto& [key, value] : kv) std::cout << key << " = " << value << "\n";
  } else {
    write_key_values(kv, out_path);
  }
}

ScanOrder parse_scan(const std::string& s) {
  return s == "random" ? ScanOrder::random : ScanOrder::sequential;
}

ModelParameters make_params(double beta, const std::vector<double>& theta,
                            int d) {
  ModelParameters p = ModelParameters::zeros(d);
  p.beta = beta;
  if (!theta.empty()) {
    if (static_cast<int>(theta.size()) != d)
      throw InvalidInput("--theta length must match the covariate dimension");
    p.theta = Eigen::Map<const Eigen::VectorXd>(
        theta.data(), static_cast<Eigen::Index>(theta.size()));
  }
  return p;
}

struct SampleArgs {
  std::string graph, covariates, out;
  double beta = 0.0;
  std::vector<double> theta;
  std::uint64_t seed = 1;
  int burn_in = 200;
  int chains = 1;
  bool exact = false;
  bool zero_one = false;
  std::string scan = "sequential";
};

int run_sample(const SampleArgs& a) {
  const WeightedHypergraph g = load_hypergraph(a.graph);
  const CovariateMatrix x = load_covariates(a.covariates, g.vertex_count());
  const ModelParameters p = make_params(a.beta, a.theta, x.d());
  if (a.chains < 1) throw InvalidInput("--chains must be >= 1");

  // One output file per chain; a single chain writes --out verbatim,
  // several write --out.<k>.
  const auto chain_path = [&](int k) {
    return a.chains == 1 ? a.out : a.out + "." + std::to_string(k);
  };
  if (a.exact) {
    const ExactSampler sampler(g, x, p);
    Xoshiro256pp rng(a.seed);
    for (int k = 0; k < a.chains; ++k)
      save_sample(sampler.draw(rng), chain_path(k), a.zero_one);
  } else {
    for (int k = 0; k < a.chains; ++k) {
      ChainConfig cfg;
      cfg.seed = derive_seed(a.seed, static_cast<std::uint64_t>(k));
      cfg.burn_in_sweeps = a.burn_in;
      cfg.scan = parse_scan(a.scan);
      save_sample(sample_glauber(g, x, p, cfg), chain_path(k), a.zero_one);
    }
  }
  return 0;
}

struct EstimateArgs {
  std::string graph, covariates, sample, out, trace;
  bool zero_one = false;
  double B = 0.0, Theta = 0.0, M = 0.0;
  double step = 0.0, tol = 0.0;
  int max_iters = 0;
};

int run_estimate(const EstimateArgs& a) {
  const WeightedHypergraph g = load_hypergraph(a.graph);
  const CovariateMatrix x = load_covariates(a.covariates, g.vertex_count());
  const SpinConfiguration y = load_sample(a.sample, a.zero_one);

  PgdConfig cfg;
  cfg.box = ParameterBox{a.B, a.Theta, a.M};
  cfg.step_size = a.step;
  cfg.grad_tol = a.tol;
  cfg.max_iters = a.max_iters;
  cfg.record_trajectory = !a.trace.empty();
  const EstimationReport rep = estimate_mple(g, x, y, cfg);

  KeyValues kv;
  kv.emplace_back("n", std::to_string(x.n()));
  kv.emplace_back("d", std::to_string(x.d()));
  kv.emplace_back("m", std::to_string(g.max_cardinality()));
  kv.emplace_back("B", fmt(a.B));
  kv.emplace_back("Theta", fmt(a.Theta));
  kv.emplace_back("M", fmt(a.M));
  kv.emplace_back("converged", rep.converged ? "1" : "0");
  kv.emplace_back("iterations", std::to_string(rep.iterations));
  kv.emplace_back("final_grad_norm", fmt(rep.final_grad_norm));
  kv.emplace_back("beta_hat", fmt(rep.estimate.beta));
  kv.emplace_back("theta_hat", fmt(rep.estimate.theta));
  emit_report(kv, a.out);
  if (!a.trace.empty()) write_trajectory_csv(rep.trajectory, a.trace);
  return rep.converged ? 0 : 2;
}

struct DiagnoseArgs {
  std::string graph, covariates, out;
  double B = 0.0, Theta = 0.0, M = 0.0;
  double degree_cap = 1.0, mass_floor = 0.05, lambda_floor = 1e-3;
  double f_norm_warn = 4.0;
  std::vector<double> truth_theta;
  std::optional<double> truth_beta;
  bool full = false;
};

int run_diagnose(const DiagnoseArgs& a) {
  const WeightedHypergraph g = load_hypergraph(a.graph);
  const CovariateMatrix x = load_covariates(a.covariates, g.vertex_count());
  const ParameterBox box{a.B, a.Theta, a.M};
  const int n = x.n(), d = x.d(), m = g.max_cardinality();

  std::optional<ModelParameters> truth;
  if (a.truth_beta || !a.truth_theta.empty()) {
    if (!a.truth_beta || a.truth_theta.empty())
      throw InvalidInput("--truth-beta and --truth-theta must come together");
    truth = make_params(*a.truth_beta, a.truth_theta, d);
  }

  AssumptionThresholds thr;
  thr.degree_cap = a.degree_cap;
  thr.mass_floor = a.mass_floor;
  thr.lambda_floor = a.lambda_floor;
  thr.f_norm_warn = a.f_norm_warn;
  const AssumptionReport rep =
      validate_assumptions(g, x, box, truth ? &*truth : nullptr, thr);

  KeyValues kv;
  kv.emplace_back("n", std::to_string(n));
  kv.emplace_back("d", std::to_string(d));
  kv.emplace_back("m", std::to_string(m));
  kv.emplace_back("edge_count", std::to_string(g.edge_count()));
  kv.emplace_back("max_degree", fmt(rep.max_degree));
  kv.emplace_back("degree_ok", rep.degree_ok ? "1" : "0");
  kv.emplace_back("top_mass", fmt(rep.top_mass));
  kv.emplace_back("mass_ratio", fmt(rep.mass_ratio));
  kv.emplace_back("mass_ok", rep.mass_ok ? "1" : "0");
  kv.emplace_back("lambda_min_q", fmt(rep.lambda_min_q));
  kv.emplace_back("lambda_max_q", fmt(rep.lambda_max_q));
  kv.emplace_back("spectrum_ok", rep.spectrum_ok ? "1" : "0");
  kv.emplace_back("max_row_norm", fmt(rep.max_row_norm));
  kv.emplace_back("row_norm_ok", rep.row_norm_ok ? "1" : "0");
  if (rep.f_inf_norm) {
    kv.emplace_back("f_inf_norm", fmt(*rep.f_inf_norm));
    kv.emplace_back("f_norm_ok", rep.f_norm_ok ? "1" : "0");
  }
  if (rep.box_ok) kv.emplace_back("box_ok", *rep.box_ok ? "1" : "0");
  kv.emplace_back("hard_ok", rep.hard_ok() ? "1" : "0");

  kv.emplace_back("smoothness_bound", fmt(a.M * a.M + 1.0));
  kv.emplace_back("grad_variance_bound_beta",
                  fmt((12.0 + 4.0 * a.B) * (m - 1) * n));
  kv.emplace_back("grad_variance_bound_theta",
                  fmt((1.0 + a.B) * 4.0 * a.M * a.M * (m - 1) * d * n));
  const double factor =
      std::exp(-(a.B + a.M * a.Theta) * (m - 1)) / std::pow(2.0, m - 1);
  kv.emplace_back("box_factor", fmt(factor));

  if (a.full) {
    try {
      const ProjectionMatrix proj = build_projection(x);
      const ReductionMatrix red = build_reduction_matrix(g);
      const Eigen::MatrixXd fa = proj.f * red.a;
      const SelectionMap sel = index_selection(fa);
      kv.emplace_back("a_frobenius_sq", fmt(red.frobenius_sq));
      kv.emplace_back("a_inf_norm", fmt(red.inf_norm));
      kv.emplace_back("a_one_norm", fmt(red.one_norm));
      kv.emplace_back("fa_frobenius_sq", fmt(fa.squaredNorm()));
      kv.emplace_back("fa_frobenius_floor",
                      fmt(red.frobenius_sq - d * double((m - 1) * (m - 1))));
      kv.emplace_back("fa_inf_norm", fmt(fa.cwiseAbs().colwise().sum().maxCoeff()));
      kv.emplace_back("selected_sq_sum", fmt(sel.selected_sq_sum));
      kv.emplace_back("concavity_lower_bound", fmt(factor * sel.selected_sq_sum));
      kv.emplace_back("concavity_per_vertex",
                      fmt(factor * sel.selected_sq_sum / n));
    } catch (const Error& e) {
      kv.emplace_back("full_error", e.what());
    }
  }
  emit_report(kv, a.out);
  return rep.hard_ok() ? 0 : 2;
}

struct ExperimentArgs {
  std::string spec, out;
};

int run_experiment(const ExperimentArgs& a) {
  const ExperimentSpec spec = load_experiment_spec(a.spec);
  const SweepResult result = run_sweep(spec);

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir / "diagnose");
  write_sweep_rows_csv(result, dir / "rows.csv");

  for (const auto& r : result.rows) {
    KeyValues kv;
    kv.emplace_back("n", std::to_string(r.n));
    kv.emplace_back("trial", std::to_string(r.trial));
    kv.emplace_back("seed", std::to_string(r.seed));
    kv.emplace_back("error", fmt(r.error));
    kv.emplace_back("iterations", std::to_string(r.iterations));
    kv.emplace_back("grad_norm", fmt(r.grad_norm));
    kv.emplace_back("converged", r.converged ? "1" : "0");
    kv.emplace_back("degree_ok", r.degree_ok ? "1" : "0");
    kv.emplace_back("mass_ok", r.mass_ok ? "1" : "0");
    kv.emplace_back("spectrum_ok", r.spectrum_ok ? "1" : "0");
    kv.emplace_back("row_norm_ok", r.row_norm_ok ? "1" : "0");
    kv.emplace_back("box_ok", r.box_ok ? "1" : "0");
    kv.emplace_back("max_degree", fmt(r.max_degree));
    kv.emplace_back("mass_ratio", fmt(r.mass_ratio));
    kv.emplace_back("lambda_min_q", fmt(r.lambda_min_q));
    kv.emplace_back("included", r.included ? "1" : "0");
    if (!r.note.empty()) kv.emplace_back("note", r.note);
    write_key_values(kv, dir / "diagnose" /
                             ("n" + std::to_string(r.n) + "_t" +
                              std::to_string(r.trial) + ".txt"));
  }

  KeyValues kv;
  kv.emplace_back("trials_per_n", std::to_string(spec.trials_per_n));
  kv.emplace_back("master_seed", std::to_string(spec.master_seed));
  for (const auto& s : result.per_n) {
    const std::string tag = "_n" + std::to_string(s.n);
    kv.emplace_back("included" + tag, std::to_string(s.included));
    kv.emplace_back("median_error" + tag, fmt(s.median_error));
    kv.emplace_back("max_iterations" + tag, std::to_string(s.max_iterations));
  }
  kv.emplace_back("slope_available", result.slope_available ? "1" : "0");
  kv.emplace_back("slope", fmt(result.slope));
  kv.emplace_back("intercept", fmt(result.intercept));
  kv.emplace_back("iteration_slope", fmt(result.iteration_slope));
  kv.emplace_back("slope_min", fmt(spec.slope_min));
  kv.emplace_back("slope_max", fmt(spec.slope_max));

  // Slope acceptance is only meaningful with at least two sizes.
  bool slope_ok = true;
  if (spec.n_values.size() >= 2)
    slope_ok = result.slope_available && result.slope >= spec.slope_min &&
               result.slope <= spec.slope_max;
  kv.emplace_back("slope_ok", slope_ok ? "1" : "0");
  write_key_values(kv, dir / "summary.txt");

  std::cout << "wrote " << (dir / "rows.csv").string() << " ("
            << result.rows.size() << " rows)\n";
  return slope_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypergraph Ising model: sampling, estimation, diagnostics"};
  app.require_subcommand(1);
  int exit_code = 0;

  SampleArgs sa;
  CLI::App* sample = app.add_subcommand(
      "sample", "Draw spin configurations from a model");
  sample->add_option("--graph", sa.graph, "hypergraph file")->required();
  sample->add_option("--covariates", sa.covariates, "covariate CSV")->required();
  sample->add_option("--beta", sa.beta, "interaction strength");
  sample->add_option("--theta", sa.theta, "field coefficients, comma separated")
      ->delimiter(',');
  sample->add_option("--seed", sa.seed, "master RNG seed");
  sample->add_option("--burn-in", sa.burn_in, "Glauber burn-in sweeps");
  sample->add_option("--chains", sa.chains, "number of independent samples");
  sample->add_flag("--exact", sa.exact, "enumerate instead of running Glauber");
  sample->add_flag("--zero-one", sa.zero_one, "write spins as {0,1}");
  sample->add_option("--scan", sa.scan, "site scan order")
      ->check(CLI::IsMember({"sequential", "random"}));
  sample->add_option("--out", sa.out, "output sample file")->required();
  sample->callback([&] { exit_code = run_sample(sa); });

  EstimateArgs ea;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Fit (theta, beta) by projected gradient ascent");
  estimate->add_option("--graph", ea.graph, "hypergraph file")->required();
  estimate->add_option("--covariates", ea.covariates, "covariate CSV")->required();
  estimate->add_option("--sample", ea.sample, "observed spin file")->required();
  estimate->add_flag("--zero-one", ea.zero_one, "sample file uses {0,1}");
  estimate->add_option("--B", ea.B, "interaction bound")->required();
  estimate->add_option("--Theta", ea.Theta, "field coefficient norm bound")
      ->required();
  estimate->add_option("--M", ea.M, "covariate row norm bound")->required();
  estimate->add_option("--step", ea.step, "step size, 0 = 1/(M^2+1)");
  estimate->add_option("--tol", ea.tol, "gradient tolerance, 0 = 1/sqrt(n)");
  estimate->add_option("--max-iters", ea.max_iters, "iteration cap, 0 = default");
  estimate->add_option("--trace", ea.trace, "trajectory CSV path");
  estimate->add_option("--out", ea.out, "report path, default stdout");
  estimate->callback([&] { exit_code = run_estimate(ea); });

  DiagnoseArgs da;
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Check the standing assumptions and concavity bounds");
  diagnose->add_option("--graph", da.graph, "hypergraph file")->required();
  diagnose->add_option("--covariates", da.covariates, "covariate CSV")->required();
  diagnose->add_option("--B", da.B, "interaction bound")->required();
  diagnose->add_option("--Theta", da.Theta, "field coefficient norm bound")
      ->required();
  diagnose->add_option("--M", da.M, "covariate row norm bound")->required();
  diagnose->add_option("--degree-cap", da.degree_cap, "max weighted degree");
  diagnose->add_option("--mass-floor", da.mass_floor, "top_mass/n floor");
  diagnose->add_option("--lambda-floor", da.lambda_floor,
                       "covariance eigenvalue floor");
  diagnose->add_option("--f-norm-warn", da.f_norm_warn,
                       "projection norm warning line");
  double tb = 0.0;
  CLI::Option* tb_opt =
      diagnose->add_option("--truth-beta", tb, "ground-truth beta");
  diagnose->add_option("--truth-theta", da.truth_theta,
                       "ground-truth theta, comma separated")
      ->delimiter(',');
  diagnose->add_flag("--full", da.full, "add reduction/selection statistics");
  diagnose->add_option("--out", da.out, "report path, default stdout");
  diagnose->callback([&] {
    if (*tb_opt) da.truth_beta = tb;
    exit_code = run_diagnose(da);
  });

  ExperimentArgs xa;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Run a synthetic parameter-recovery sweep");
  experiment->add_option("--spec", xa.spec, "experiment spec file")->required();
  experiment->add_option("--out", xa.out, "output directory")->required();
  experiment->callback([&] { exit_code = run_experiment(xa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
