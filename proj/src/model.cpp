#include "hising/model.hpp"

#include <bit>

#include "hising/errors.hpp"

namespace hising {

namespace {

void check_model_inputs(const WeightedHypergraph& g, const CovariateMatrix& x,
                        const ModelParameters& p) {
  if (x.n() != g.vertex_count())
    throw InvalidInput("model: covariate rows != vertex count");
  if (p.theta.size() != x.d())
    throw InvalidInput("model: theta dimension != covariate columns");
  if (!p.theta.allFinite() || !std::isfinite(p.beta))
    throw InvalidInput("model: non-finite parameters");
}

void check_config(const WeightedHypergraph& g, const SpinConfiguration& y) {
  if (y.size() != g.vertex_count())
    throw InvalidInput("model: spin configuration length != vertex count");
}

}  // namespace

SpinConfiguration::SpinConfiguration(std::vector<std::int8_t> spins)
    : y_(std::move(spins)) {
  if (y_.empty()) throw InvalidInput("spins: empty configuration");
  for (std::int8_t s : y_)
    if (s != 1 && s != -1) throw InvalidInput("spins: entries must be +1 or -1");
}

SpinConfiguration::SpinConfiguration(int n, std::int8_t fill)
    : y_(static_cast<size_t>(n), fill) {
  if (n < 1) throw InvalidInput("spins: empty configuration");
  if (fill != 1 && fill != -1) throw InvalidInput("spins: entries must be +1 or -1");
}

SpinConfiguration SpinConfiguration::from_bits(int n, std::uint64_t mask) {
  if (n < 1 || n > 63) throw InvalidInput("spins: bitmask form needs 1 <= n <= 63");
  std::vector<std::int8_t> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    y[static_cast<size_t>(i)] = (mask >> i) & 1 ? 1 : -1;
  return SpinConfiguration(std::move(y));
}

std::uint64_t SpinConfiguration::to_bits() const {
  if (size() > 63) throw InvalidInput("spins: bitmask form needs n <= 63");
  std::uint64_t mask = 0;
  for (int i = 0; i < size(); ++i)
    if (y_[static_cast<size_t>(i)] > 0) mask |= std::uint64_t{1} << i;
  return mask;
}

void SpinConfiguration::set(int i, int s) {
  if (s != 1 && s != -1) throw InvalidInput("spins: entries must be +1 or -1");
  y_[static_cast<size_t>(i)] = static_cast<std::int8_t>(s);
}

void ParameterBox::validate() const {
  const bool ok = beta_bound > 0.0 && std::isfinite(beta_bound) &&
                  theta_bound > 0.0 && std::isfinite(theta_bound) &&
                  covariate_bound > 0.0 && std::isfinite(covariate_bound);
  if (!ok) throw InvalidInput("parameter box: bounds must be positive and finite");
}

double f_value(const WeightedHypergraph& g, const SpinConfiguration& y) {
  check_config(g, y);
  double f = 0.0;
  for (const auto& e : g.edges()) {
    int parity = 1;
    for (VertexId v : e.vertices) parity *= y[v];
    f += e.weight * parity;
  }
  return f;
}

double f_partial(const WeightedHypergraph& g, const SpinConfiguration& y, int i) {
  check_config(g, y);
  double fi = 0.0;
  for (EdgeId eid : g.edges_at(i)) {
    const auto& e = g.edge(eid);
    int parity = 1;
    for (VertexId v : e.vertices)
      if (v != i) parity *= y[v];
    fi += e.weight * parity;
  }
  return fi;
}

Eigen::VectorXd interaction_fields(const WeightedHypergraph& g,
                                   const SpinConfiguration& y) {
  check_config(g, y);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.vertex_count());
  for (const auto& e : g.edges()) {
    int parity = 1;
    for (VertexId v : e.vertices) parity *= y[v];
    const double p = e.weight * parity;
    // prod_{u in e, u != v} y_u = y_v * prod_{u in e} y_u since y_v^2 = 1
    for (VertexId v : e.vertices) f[v] += p * y[v];
  }
  return f;
}

double conditional_prob(const WeightedHypergraph& g, const CovariateMatrix& x,
                        const ModelParameters& p, const SpinConfiguration& y,
                        int i, int s) {
  check_model_inputs(g, x, p);
  check_config(g, y);
  if (s != 1 && s != -1) throw InvalidInput("conditional_prob: s must be +1 or -1");
  if (i < 0 || i >= g.vertex_count())
    throw InvalidInput("conditional_prob: vertex out of range");
  const double z = x.row(i).dot(p.theta) + p.beta * f_partial(g, y, i);
  return 1.0 / (1.0 + std::exp(-2.0 * z * s));
}

double log_weight(const WeightedHypergraph& g, const CovariateMatrix& x,
                  const ModelParameters& p, const SpinConfiguration& y) {
  check_model_inputs(g, x, p);
  check_config(g, y);
  double linear = 0.0;
  for (int i = 0; i < y.size(); ++i) linear += x.row(i).dot(p.theta) * y[i];
  return linear + p.beta * f_value(g, y);
}

std::vector<double> enumerate_log_weights(const WeightedHypergraph& g,
                                          const CovariateMatrix& x,
                                          const ModelParameters& p, int cap) {
  check_model_inputs(g, x, p);
  const int n = g.vertex_count();
  if (cap < 1 || cap > 63) throw InvalidInput("enumerate: cap must be in [1, 63]");
  if (n > cap) throw TooLarge("enumerate: vertex count exceeds enumeration cap");

  const Eigen::VectorXd c = x.matrix() * p.theta;  // c_i = theta^T x_i
  std::vector<double> logw(std::uint64_t{1} << n);

  // Walk configurations in Gray-code order; step k flips spin ctz(k), so
  // the interaction and linear terms update in O(edges at that vertex).
  SpinConfiguration y(n, -1);
  std::vector<double> prod(static_cast<size_t>(g.edge_count()));  // w_e prod y_v
  double f = 0.0;
  double linear = 0.0;
  auto resync = [&] {
    f = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      int parity = 1;
      for (VertexId v : g.edge(e).vertices) parity *= y[v];
      prod[static_cast<size_t>(e)] = g.edge(e).weight * parity;
      f += prod[static_cast<size_t>(e)];
    }
    linear = 0.0;
    for (int i = 0; i < n; ++i) linear += c[i] * y[i];
  };
  resync();
  logw[0] = linear + p.beta * f;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    if ((k & 0xffff) == 0) resync();  // cap accumulated rounding drift
    const int j = std::countr_zero(k);
    linear -= 2.0 * c[j] * y[j];
    for (EdgeId e : g.edges_at(j)) {
      f -= 2.0 * prod[static_cast<size_t>(e)];
      prod[static_cast<size_t>(e)] = -prod[static_cast<size_t>(e)];
    }
    y.flip(j);
    logw[k ^ (k >> 1)] = linear + p.beta * f;
  }
  return logw;
}

double log_partition(const WeightedHypergraph& g, const CovariateMatrix& x,
                     const ModelParameters& p, int cap) {
  const std::vector<double> logw = enumerate_log_weights(g, x, p, cap);
  double hi = logw[0];
  for (double lw : logw) hi = std::max(hi, lw);
  double acc = 0.0;
  for (double lw : logw) acc += std::exp(lw - hi);
  return hi + std::log(acc);
}

}  // namespace hising
