#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace proxeig {

struct Edge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double w = 0.0;

  bool operator==(const Edge&) const = default;
};

/// Undirected weighted graph with edges stored once (i < j) and an optional
/// boundary set. Validated on construction: no self-loops, no duplicates,
/// nonnegative finite weights, boundary inside the vertex set.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges,
                std::vector<std::uint32_t> boundary = {},
                std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t n_vertices() const { return n_; }
  std::size_t n_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::uint32_t>& boundary() const { return boundary_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }

  /// Copy with a different boundary set.
  WeightedGraph with_boundary(std::vector<std::uint32_t> boundary) const;

  /// Component id per vertex, ids numbered 0.. in order of first vertex.
  std::vector<std::size_t> components() const;
  std::size_t n_components() const;
  bool connected() const { return n_components() <= 1; }

  /// Hop distance to the nearest source (ignores weights); unreachable
  /// vertices get -1.
  std::vector<double> bfs_distance(const std::vector<std::uint32_t>& sources) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> boundary_;
  std::optional<std::vector<int>> labels_;
};

/// Path 0 - 1 - ... - (n-1) with unit weights.
WeightedGraph path_graph(std::size_t n, std::vector<std::uint32_t> boundary = {});

/// 4-neighbour grid graph with unit weights, vertex (r, c) -> r * cols + c.
WeightedGraph grid_graph(std::size_t rows, std::size_t cols,
                         bool boundary_is_border = false);

/// Two interleaved half circles with Gaussian noise, symmetric k-NN graph
/// with weights exp(-d^2 / sigma^2), sigma = median k-NN distance. Stores the
/// moon index (0/1) of every vertex as labels.
WeightedGraph two_moons(std::size_t n_per_moon, double noise_std, std::size_t k,
                        std::uint64_t seed);

}  // namespace proxeig
