#include "hising/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hising/errors.hpp"

namespace hising {

namespace {

std::uint64_t pair_key(VertexId i, VertexId j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

}  // namespace

WeightedHypergraph::WeightedHypergraph(int n, int m, std::vector<Hyperedge> edges)
    : n_(n), m_(m) {
  if (n < 1) throw InvalidInput("hypergraph: vertex count must be >= 1");
  if (m < 2) throw InvalidInput("hypergraph: max cardinality must be >= 2");

  edges_.reserve(edges.size());
  std::map<std::vector<VertexId>, EdgeId> seen;
  for (auto& e : edges) {
    if (!std::isfinite(e.weight))
      throw InvalidInput("hypergraph: non-finite edge weight");
    if (e.weight == 0.0) continue;
    const int k = static_cast<int>(e.vertices.size());
    if (k < 2 || k > m_)
      throw InvalidInput("hypergraph: edge cardinality outside [2, m]");
    std::sort(e.vertices.begin(), e.vertices.end());
    for (int a = 0; a < k; ++a) {
      if (e.vertices[a] < 0 || e.vertices[a] >= n_)
        throw InvalidInput("hypergraph: vertex id out of range");
      if (a > 0 && e.vertices[a] == e.vertices[a - 1])
        throw InvalidInput("hypergraph: repeated vertex within an edge");
    }
    const EdgeId id = static_cast<EdgeId>(edges_.size());
    if (!seen.emplace(e.vertices, id).second)
      throw InvalidInput("hypergraph: duplicate edge (same vertex set)");
    edges_.push_back(std::move(e));
  }

  incident_.assign(static_cast<size_t>(n_), {});
  degree_.assign(static_cast<size_t>(n_), 0.0);
  for (EdgeId e = 0; e < edge_count(); ++e) {
    for (VertexId v : edges_[static_cast<size_t>(e)].vertices) {
      incident_[static_cast<size_t>(v)].push_back(e);
      degree_[static_cast<size_t>(v)] += std::abs(edges_[static_cast<size_t>(e)].weight);
    }
  }
  pair_index_ = std::make_unique<PairIndex>();
}

WeightedHypergraph::WeightedHypergraph(const WeightedHypergraph& other)
    : n_(other.n_),
      m_(other.m_),
      edges_(other.edges_),
      incident_(other.incident_),
      degree_(other.degree_),
      pair_index_(std::make_unique<PairIndex>()) {}

WeightedHypergraph& WeightedHypergraph::operator=(const WeightedHypergraph& other) {
  if (this != &other) {
    n_ = other.n_;
    m_ = other.m_;
    edges_ = other.edges_;
    incident_ = other.incident_;
    degree_ = other.degree_;
    pair_index_ = std::make_unique<PairIndex>();
  }
  return *this;
}

void WeightedHypergraph::check_vertex(VertexId i) const {
  if (i < 0 || i >= n_) throw InvalidInput("hypergraph: vertex id out of range");
}

const std::vector<EdgeId>& WeightedHypergraph::edges_at(VertexId i) const {
  check_vertex(i);
  return incident_[static_cast<size_t>(i)];
}

void WeightedHypergraph::build_pair_index() const {
  for (EdgeId e = 0; e < edge_count(); ++e) {
    const auto& verts = edges_[static_cast<size_t>(e)].vertices;
    const int k = static_cast<int>(verts.size());
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        pair_index_->map[pair_key(verts[a], verts[b])].push_back(e);
  }
}

std::span<const EdgeId> WeightedHypergraph::edges_at_pair(VertexId i, VertexId j) const {
  check_vertex(i);
  check_vertex(j);
  if (i == j) throw InvalidInput("hypergraph: pair query needs distinct vertices");
  std::call_once(pair_index_->built, [this] { build_pair_index(); });
  auto it = pair_index_->map.find(pair_key(i, j));
  if (it == pair_index_->map.end()) return {};
  return it->second;
}

std::optional<EdgeId> WeightedHypergraph::find_edge(
    std::span<const VertexId> vertices) const {
  std::vector<VertexId> key(vertices.begin(), vertices.end());
  std::sort(key.begin(), key.end());
  if (key.empty()) return std::nullopt;
  VertexId probe = key.front();
  check_vertex(probe);
  for (EdgeId e : edges_at(probe))
    if (edges_[static_cast<size_t>(e)].vertices == key) return e;
  return std::nullopt;
}

double WeightedHypergraph::vertex_degree(VertexId i) const {
  check_vertex(i);
  return degree_[static_cast<size_t>(i)];
}

double WeightedHypergraph::max_vertex_degree() const {
  double best = 0.0;
  for (double deg : degree_) best = std::max(best, deg);
  return best;
}

double WeightedHypergraph::top_mass() const {
  double mass = 0.0;
  for (const auto& e : edges_)
    if (static_cast<int>(e.vertices.size()) == m_) mass += e.weight * e.weight;
  return mass;
}

WeightedHypergraph WeightedHypergraph::normalize_degrees(double cap) const {
  if (!(cap > 0.0)) throw InvalidInput("normalize_degrees: cap must be positive");
  const double maxdeg = max_vertex_degree();
  const double scale = (maxdeg > cap) ? cap / maxdeg : 1.0;
  std::vector<Hyperedge> scaled = edges_;
  for (auto& e : scaled) e.weight *= scale;
  return WeightedHypergraph(n_, m_, std::move(scaled));
}

}  // namespace hising
