#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hising/model.hpp"
#include "hising/rng.hpp"

namespace hising {

enum class ScanOrder { sequential, random };

struct ChainConfig {
  std::uint64_t seed = 0;
  int burn_in_sweeps = 200;
  ScanOrder scan = ScanOrder::sequential;
};

// Samples from the exact distribution by inverse CDF over all 2^n
// configurations. Builds the table once; draws are O(n) binary searches.
class ExactSampler {
 public:
  ExactSampler(const WeightedHypergraph& g, const CovariateMatrix& x,
               const ModelParameters& p, int cap = kEnumerationCap);

  SpinConfiguration draw(Xoshiro256pp& rng) const;

  // Normalized probabilities indexed by spin bitmask.
  std::vector<double> probabilities() const;

 private:
  int n_;
  std::vector<double> cdf_;
};

// Single-site heat-bath dynamics. Each edge product and each local field
// sum_{e: i in e} w_e prod_{v in e} y_v is kept incrementally, so one site
// update costs O(sum of |e| over edges at the flipped site).
//
// Holds references to the hypergraph; the caller keeps it alive.
class GlauberChain {
 public:
  // Starts from `init` when given, else from uniform random spins.
  GlauberChain(const WeightedHypergraph& g, const CovariateMatrix& x,
               const ModelParameters& p, const ChainConfig& cfg,
               std::optional<SpinConfiguration> init = std::nullopt);

  // One site update; sites come from the configured scan order.
  void step();
  void run_sweeps(int sweeps);

  const SpinConfiguration& configuration() const { return y_; }
  std::uint64_t steps_taken() const { return steps_; }

  // Cached local field f_i(y_{-i}) of the current configuration.
  double field(int i) const {
    return y_[i] * s_[static_cast<size_t>(i)];
  }

 private:
  void rebuild_fields();
  void flip_site(int j);

  const WeightedHypergraph& g_;
  Eigen::VectorXd c_;  // theta^T x_i per vertex
  double beta_;
  ScanOrder scan_;
  Xoshiro256pp rng_;
  SpinConfiguration y_;
  std::vector<double> prod_;  // per edge, w_e prod_{v in e} y_v
  std::vector<double> s_;     // per vertex, sum of prod_ over incident edges
  std::uint64_t steps_ = 0;
  int scan_pos_ = 0;
};

// Exact draw with a one-shot generator seeded from `seed`.
SpinConfiguration sample_exact(const WeightedHypergraph& g,
                               const CovariateMatrix& x,
                               const ModelParameters& p, std::uint64_t seed,
                               int cap = kEnumerationCap);

// Runs a fresh chain for cfg.burn_in_sweeps and returns its state.
SpinConfiguration sample_glauber(const WeightedHypergraph& g,
                                 const CovariateMatrix& x,
                                 const ModelParameters& p,
                                 const ChainConfig& cfg,
                                 std::optional<SpinConfiguration> init = std::nullopt);

}  // namespace hising
