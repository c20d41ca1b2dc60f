#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hising/experiments.hpp"
#include "hising/model.hpp"
#include "hising/optimizer.hpp"

namespace hising {

// Hypergraph text format: `hypergraph n=<n> m=<m>` header, then one edge
// per line as `w v1 v2 ... vk`. `#` starts a comment anywhere in a line.
WeightedHypergraph load_hypergraph(const std::filesystem::path& path);
void save_hypergraph(const WeightedHypergraph& g,
                     const std::filesystem::path& path);

// CSV with d numeric columns, one row per vertex, optional header line.
// When expected_n >= 0 the row count must match it.
CovariateMatrix load_covariates(const std::filesystem::path& path,
                                int expected_n = -1);
void save_covariates(const CovariateMatrix& x,
                     const std::filesystem::path& path);

// One line of n whitespace-separated spins; +-1 by default, {0,1} with
// zero_one (0 maps to -1).
SpinConfiguration load_sample(const std::filesystem::path& path,
                              bool zero_one = false);
void save_sample(const SpinConfiguration& y, const std::filesystem::path& path,
                 bool zero_one = false);

// Structured `key = value` documents, one pair per line.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(const KeyValues& kv, const std::filesystem::path& path);

void write_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory,
                          const std::filesystem::path& path);

// Experiment spec file: `key = value` lines with `#` comments. Unknown
// keys are rejected. See ExperimentSpec for the field list; n_values and
// fixed_theta are comma-separated.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

void write_sweep_rows_csv(const SweepResult& result,
                          const std::filesystem::path& path);

}  // namespace hising
