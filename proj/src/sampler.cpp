#include "hising/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "hising/errors.hpp"

namespace hising {

ExactSampler::ExactSampler(const WeightedHypergraph& g, const CovariateMatrix& x,
                           const ModelParameters& p, int cap)
    : n_(g.vertex_count()) {
  std::vector<double> logw = enumerate_log_weights(g, x, p, cap);
  double hi = logw[0];
  for (double lw : logw) hi = std::max(hi, lw);
  double total = 0.0;
  cdf_.resize(logw.size());
  for (size_t k = 0; k < logw.size(); ++k) {
    total += std::exp(logw[k] - hi);
    cdf_[k] = total;
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

SpinConfiguration ExactSampler::draw(Xoshiro256pp& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::uint64_t>(it - cdf_.begin());
  return SpinConfiguration::from_bits(n_, idx);
}

std::vector<double> ExactSampler::probabilities() const {
  std::vector<double> probs(cdf_.size());
  double prev = 0.0;
  for (size_t k = 0; k < cdf_.size(); ++k) {
    probs[k] = cdf_[k] - prev;
    prev = cdf_[k];
  }
  return probs;
}

GlauberChain::GlauberChain(const WeightedHypergraph& g, const CovariateMatrix& x,
                           const ModelParameters& p, const ChainConfig& cfg,
                           std::optional<SpinConfiguration> init)
    : g_(g),
      beta_(p.beta),
      scan_(cfg.scan),
      rng_(cfg.seed),
      y_(init ? std::move(*init) : SpinConfiguration(g.vertex_count(), 1)) {
  if (x.n() != g.vertex_count())
    throw InvalidInput("glauber: covariate rows != vertex count");
  if (p.theta.size() != x.d())
    throw InvalidInput("glauber: theta dimension != covariate columns");
  if (y_.size() != g.vertex_count())
    throw InvalidInput("glauber: init configuration length != vertex count");
  if (!std::isfinite(p.beta) || !p.theta.allFinite())
    throw InvalidInput("glauber: non-finite parameters");
  if (cfg.burn_in_sweeps < 0)
    throw InvalidInput("glauber: burn-in must be nonnegative");
  c_ = x.matrix() * p.theta;
  if (!init)
    for (int i = 0; i < y_.size(); ++i) y_.set(i, rng_.spin(0.5));
  rebuild_fields();
}

void GlauberChain::rebuild_fields() {
  prod_.assign(static_cast<size_t>(g_.edge_count()), 0.0);
  s_.assign(static_cast<size_t>(g_.vertex_count()), 0.0);
  for (EdgeId e = 0; e < g_.edge_count(); ++e) {
    int parity = 1;
    for (VertexId v : g_.edge(e).vertices) parity *= y_[v];
    prod_[static_cast<size_t>(e)] = g_.edge(e).weight * parity;
    for (VertexId v : g_.edge(e).vertices)
      s_[static_cast<size_t>(v)] += prod_[static_cast<size_t>(e)];
  }
}

void GlauberChain::flip_site(int j) {
  for (EdgeId e : g_.edges_at(j)) {
    const double delta = -2.0 * prod_[static_cast<size_t>(e)];
    for (VertexId v : g_.edge(e).vertices) s_[static_cast<size_t>(v)] += delta;
    prod_[static_cast<size_t>(e)] = -prod_[static_cast<size_t>(e)];
  }
  y_.flip(j);
}

void GlauberChain::step() {
  const int n = g_.vertex_count();
  int i;
  if (scan_ == ScanOrder::sequential) {
    i = scan_pos_;
    scan_pos_ = (scan_pos_ + 1) % n;
  } else {
    i = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
  }
  // f_i = y_i * s_i: dividing the full edge product by y_i via y_i^2 = 1.
  const double fi = y_[i] * s_[static_cast<size_t>(i)];
  const double z = c_[i] + beta_ * fi;
  const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * z));
  const int snew = rng_.uniform01() < p_plus ? 1 : -1;
  if (snew != y_[i]) flip_site(i);
  ++steps_;
  if ((steps_ & 0xffff) == 0) rebuild_fields();  // cap rounding drift
}

void GlauberChain::run_sweeps(int sweeps) {
  if (sweeps < 0) throw InvalidInput("glauber: sweep count must be nonnegative");
  const std::uint64_t updates =
      static_cast<std::uint64_t>(sweeps) * static_cast<std::uint64_t>(g_.vertex_count());
  for (std::uint64_t t = 0; t < updates; ++t) step();
}

SpinConfiguration sample_exact(const WeightedHypergraph& g,
                               const CovariateMatrix& x,
                               const ModelParameters& p, std::uint64_t seed,
                               int cap) {
  ExactSampler sampler(g, x, p, cap);
  Xoshiro256pp rng(seed);
  return sampler.draw(rng);
}

SpinConfiguration sample_glauber(const WeightedHypergraph& g,
                                 const CovariateMatrix& x,
                                 const ModelParameters& p,
                                 const ChainConfig& cfg,
                                 std::optional<SpinConfiguration> init) {
  GlauberChain chain(g, x, p, cfg, std::move(init));
  chain.run_sweeps(cfg.burn_in_sweeps);
  return chain.configuration();
}

}  // namespace hising
