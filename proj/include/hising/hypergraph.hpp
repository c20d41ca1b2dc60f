#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace hising {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct Hyperedge {
  std::vector<VertexId> vertices;  // sorted ascending, no repeats
  double weight = 0.0;
};

// Weighted hypergraph on vertices 0..n-1 with edges of cardinality 2..m.
// Immutable after construction; zero-weight edges are dropped on input and
// duplicate vertex sets rejected, so every stored edge is unique.
//
// The per-vertex incidence index is built in the constructor. The
// vertex-pair index is built lazily on first use (only diagnostics need it).
class WeightedHypergraph {
 public:
  // Takes ownership of `edges`; vertex lists are sorted in place.
  // Throws InvalidInput on bad vertices, repeats, cardinality outside
  // [2, m], non-finite weights, or duplicate edges.
  WeightedHypergraph(int n, int m, std::vector<Hyperedge> edges);

  WeightedHypergraph(const WeightedHypergraph& other);
  WeightedHypergraph& operator=(const WeightedHypergraph& other);
  WeightedHypergraph(WeightedHypergraph&&) noexcept = default;
  WeightedHypergraph& operator=(WeightedHypergraph&&) noexcept = default;

  int vertex_count() const { return n_; }
  int max_cardinality() const { return m_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  const Hyperedge& edge(EdgeId e) const { return edges_[static_cast<size_t>(e)]; }

  // Edge ids incident to vertex i, ascending.
  const std::vector<EdgeId>& edges_at(VertexId i) const;

  // Edge ids containing both i and j (i != j), ascending. Thread-safe; the
  // underlying index is built once on first call.
  std::span<const EdgeId> edges_at_pair(VertexId i, VertexId j) const;

  // Exact lookup by vertex set (any order, no repeats).
  std::optional<EdgeId> find_edge(std::span<const VertexId> vertices) const;

  // Weighted degree sum_{e: i in e} |w_e|.
  double vertex_degree(VertexId i) const;
  double max_vertex_degree() const;

  // sum of w_e^2 over edges with |e| == m.
  double top_mass() const;

  // Rescales all weights by min(1, cap / max_vertex_degree()), leaving the
  // edge structure unchanged. cap must be positive.
  WeightedHypergraph normalize_degrees(double cap) const;

 private:
  struct PairIndex {
    std::once_flag built;
    std::unordered_map<std::uint64_t, std::vector<EdgeId>> map;
  };

  void check_vertex(VertexId i) const;
  void build_pair_index() const;

  int n_ = 0;
  int m_ = 2;
  std::vector<Hyperedge> edges_;
  std::vector<std::vector<EdgeId>> incident_;  // per vertex, ascending
  std::vector<double> degree_;                 // sum of |w_e| per vertex
  mutable std::unique_ptr<PairIndex> pair_index_;
};

}  // namespace hising
