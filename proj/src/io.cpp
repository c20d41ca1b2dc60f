#include "hising/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hising/errors.hpp"

namespace hising {

namespace {

std::string strip_comment(const std::string& line) {
  const size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream stream(s);
  while (std::getline(stream, item, sep)) out.push_back(trim(item));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

double require_double(const std::string& s, const std::string& what) {
  double v;
  if (!parse_double(s, v))
    throw InvalidInput("parse error: bad " + what + " '" + s + "'");
  return v;
}

long long require_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw InvalidInput("parse error: bad " + what + " '" + s + "'");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write file: " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

WeightedHypergraph load_hypergraph(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int n = -1, m = -1;
  bool have_header = false;
  std::vector<Hyperedge> edges;
  while (std::getline(in, line)) {
    std::istringstream row(strip_comment(line));
    std::string first;
    if (!(row >> first)) continue;  // blank or comment-only line
    if (!have_header) {
      if (first != "hypergraph")
        throw InvalidInput("hypergraph file: missing 'hypergraph n=... m=...' header");
      std::string field;
      while (row >> field) {
        if (field.rfind("n=", 0) == 0)
          n = static_cast<int>(require_int(field.substr(2), "vertex count"));
        else if (field.rfind("m=", 0) == 0)
          m = static_cast<int>(require_int(field.substr(2), "cardinality"));
        else
          throw InvalidInput("hypergraph file: unknown header field '" + field + "'");
      }
      if (n < 0 || m < 0)
        throw InvalidInput("hypergraph file: header must set both n and m");
      have_header = true;
      continue;
    }
    Hyperedge e;
    e.weight = require_double(first, "edge weight");
    std::string tok;
    while (row >> tok)
      e.vertices.push_back(
          static_cast<VertexId>(require_int(tok, "vertex index")));
    edges.push_back(std::move(e));
  }
  if (!have_header) throw InvalidInput("hypergraph file: empty file");
  return WeightedHypergraph(n, m, std::move(edges));
}

void save_hypergraph(const WeightedHypergraph& g,
                     const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "hypergraph n=" << g.vertex_count() << " m=" << g.max_cardinality()
      << "\n";
  for (const auto& e : g.edges()) {
    out << e.weight;
    for (VertexId v : e.vertices) out << ' ' << v;
    out << "\n";
  }
}

CovariateMatrix load_covariates(const std::filesystem::path& path,
                                int expected_n) {
  std::ifstream in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first_line = true;
  while (std::getline(in, line)) {
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::vector<std::string> cells = split(body, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const auto& cell : cells) {
      double v;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_line) {  // optional header
        first_line = false;
        continue;
      }
      throw InvalidInput("covariate file: non-numeric cell in '" + line + "'");
    }
    first_line = false;
    if (!rows.empty() && rows.back().size() != row.size())
      throw InvalidInput("covariate file: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("covariate file: no data rows");
  if (expected_n >= 0 && static_cast<int>(rows.size()) != expected_n)
    throw InvalidInput("covariate file: row count does not match vertex count");
  Eigen::MatrixXd x(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows[i].size(); ++k)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return CovariateMatrix(std::move(x));
}

void save_covariates(const CovariateMatrix& x,
                     const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (int i = 0; i < x.n(); ++i) {
    for (int k = 0; k < x.d(); ++k) out << (k ? "," : "") << x.matrix()(i, k);
    out << "\n";
  }
}

SpinConfiguration load_sample(const std::filesystem::path& path, bool zero_one) {
  std::ifstream in = open_in(path);
  std::vector<std::int8_t> spins;
  std::string tok;
  while (in >> tok) {
    const long long v = require_int(tok, "spin");
    int spin;
    if (zero_one) {
      if (v != 0 && v != 1)
        throw InvalidInput("sample file: entries must be 0 or 1");
      spin = v == 1 ? 1 : -1;
    } else {
      if (v != 1 && v != -1)
        throw InvalidInput("sample file: entries must be +1 or -1");
      spin = static_cast<int>(v);
    }
    spins.push_back(static_cast<std::int8_t>(spin));
  }
  if (spins.empty()) throw InvalidInput("sample file: empty");
  return SpinConfiguration(std::move(spins));
}

void save_sample(const SpinConfiguration& y, const std::filesystem::path& path,
                 bool zero_one) {
  std::ofstream out = open_out(path);
  for (int i = 0; i < y.size(); ++i) {
    const int v = zero_one ? (y[i] > 0 ? 1 : 0) : y[i];
    out << (i ? " " : "") << v;
  }
  out << "\n";
}

void write_key_values(const KeyValues& kv, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
}

void write_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory,
                          const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "iteration,lpl_value,grad_norm\n";
  for (const auto& pt : trajectory)
    out << pt.iteration << ',' << pt.lpl_value << ',' << pt.grad_norm << "\n";
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  ExperimentSpec spec;
  std::string line;
  std::vector<double> fixed_theta;
  bool have_fixed_beta = false;
  double fixed_beta = 0.0;
  while (std::getline(in, line)) {
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("experiment spec: expected 'key = value' in '" + line + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));

    if (key == "family") {
      if (value == "random_uniform_m") spec.family = Family::random_uniform_m;
      else if (value == "group_blocks") spec.family = Family::group_blocks;
      else if (value == "pairwise") spec.family = Family::pairwise;
      else throw InvalidInput("experiment spec: unknown family '" + value + "'");
    } else if (key == "n_values") {
      spec.n_values.clear();
      for (const auto& item : split(value, ','))
        spec.n_values.push_back(static_cast<int>(require_int(item, "n value")));
    } else if (key == "d") {
      spec.d = static_cast<int>(require_int(value, "d"));
    } else if (key == "m") {
      spec.m = static_cast<int>(require_int(value, "m"));
    } else if (key == "B") {
      spec.truth_box.beta_bound = require_double(value, "B");
    } else if (key == "Theta") {
      spec.truth_box.theta_bound = require_double(value, "Theta");
    } else if (key == "M") {
      spec.truth_box.covariate_bound = require_double(value, "M");
    } else if (key == "truth_draw") {
      if (value == "fixed") spec.truth_draw = TruthDraw::fixed;
      else if (value == "uniform80") spec.truth_draw = TruthDraw::uniform80;
      else throw InvalidInput("experiment spec: unknown truth_draw '" + value + "'");
    } else if (key == "fixed_beta") {
      fixed_beta = require_double(value, "fixed_beta");
      have_fixed_beta = true;
    } else if (key == "fixed_theta") {
      fixed_theta.clear();
      for (const auto& item : split(value, ','))
        fixed_theta.push_back(require_double(item, "fixed_theta entry"));
    } else if (key == "trials_per_n") {
      spec.trials_per_n = static_cast<int>(require_int(value, "trials_per_n"));
    } else if (key == "master_seed") {
      spec.master_seed =
          static_cast<std::uint64_t>(require_int(value, "master_seed"));
    } else if (key == "sampler") {
      if (value == "exact") spec.sampler = SamplerKind::exact;
      else if (value == "glauber") spec.sampler = SamplerKind::glauber;
      else throw InvalidInput("experiment spec: unknown sampler '" + value + "'");
    } else if (key == "burn_in") {
      spec.burn_in_sweeps = static_cast<int>(require_int(value, "burn_in"));
    } else if (key == "scan") {
      if (value == "sequential") spec.scan = ScanOrder::sequential;
      else if (value == "random") spec.scan = ScanOrder::random;
      else throw InvalidInput("experiment spec: unknown scan order '" + value + "'");
    } else if (key == "exact_cap") {
      spec.exact_cap = static_cast<int>(require_int(value, "exact_cap"));
    } else if (key == "degree_cap") {
      spec.degree_cap = require_double(value, "degree_cap");
    } else if (key == "weight_scale") {
      spec.weight_scale = require_double(value, "weight_scale");
    } else if (key == "uniform_rounds") {
      spec.uniform_rounds = static_cast<int>(require_int(value, "uniform_rounds"));
    } else if (key == "mass_floor") {
      spec.mass_floor = require_double(value, "mass_floor");
    } else if (key == "lambda_floor") {
      spec.lambda_floor = require_double(value, "lambda_floor");
    } else if (key == "lambda_min_target") {
      spec.lambda_min_target = require_double(value, "lambda_min_target");
    } else if (key == "covariate_retries") {
      spec.covariate_retries =
          static_cast<int>(require_int(value, "covariate_retries"));
    } else if (key == "slope_min") {
      spec.slope_min = require_double(value, "slope_min");
    } else if (key == "slope_max") {
      spec.slope_max = require_double(value, "slope_max");
    } else if (key == "threads") {
      spec.threads = static_cast<int>(require_int(value, "threads"));
    } else {
      throw InvalidInput("experiment spec: unknown key '" + key + "'");
    }
  }
  if (spec.truth_draw == TruthDraw::fixed) {
    if (!have_fixed_beta || fixed_theta.empty())
      throw InvalidInput(
          "experiment spec: fixed truth needs fixed_beta and fixed_theta");
    spec.fixed_truth.beta = fixed_beta;
    spec.fixed_truth.theta = Eigen::Map<const Eigen::VectorXd>(
        fixed_theta.data(), static_cast<Eigen::Index>(fixed_theta.size()));
  }
  spec.validate();
  return spec;
}

void write_sweep_rows_csv(const SweepResult& result,
                          const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "n,trial,seed,error,iterations,grad_norm,converged,degree_ok,"
         "mass_ok,spectrum_ok,row_norm_ok,box_ok,max_degree,mass_ratio,"
         "lambda_min_q,included,note\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << r.trial << ',' << r.seed << ',' << r.error << ','
        << r.iterations << ',' << r.grad_norm << ',' << int{r.converged} << ','
        << int{r.degree_ok} << ',' << int{r.mass_ok} << ','
        << int{r.spectrum_ok} << ',' << int{r.row_norm_ok} << ','
        << int{r.box_ok} << ',' << r.max_degree << ',' << r.mass_ratio << ','
        << r.lambda_min_q << ',' << int{r.included} << ',';
    for (char c : r.note) out << (c == ',' || c == '\n' ? ';' : c);
    out << "\n";
  }
}

}  // namespace hising
