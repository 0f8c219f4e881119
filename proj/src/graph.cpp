#include "proxeig/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "proxeig/error.hpp"

namespace proxeig {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges,
                             std::vector<std::uint32_t> boundary,
                             std::optional<std::vector<int>> labels)
    : n_(n_vertices),
      edges_(std::move(edges)),
      boundary_(std::move(boundary)),
      labels_(std::move(labels)) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (Edge& e : edges_) {
    require(e.i != e.j, ErrorKind::kInvalidInput, "graph has a self-loop");
    require(e.i < n_ && e.j < n_, ErrorKind::kInvalidInput,
            "edge endpoint out of range");
    require(std::isfinite(e.w) && e.w >= 0.0, ErrorKind::kInvalidInput,
            "edge weight must be finite and nonnegative");
    if (e.i > e.j) std::swap(e.i, e.j);
    require(seen.emplace(e.i, e.j).second, ErrorKind::kInvalidInput,
            "duplicate edge " + std::to_string(e.i) + "-" + std::to_string(e.j));
  }
  std::sort(boundary_.begin(), boundary_.end());
  boundary_.erase(std::unique(boundary_.begin(), boundary_.end()),
                  boundary_.end());
  for (auto b : boundary_) {
    require(b < n_, ErrorKind::kInvalidInput, "boundary vertex out of range");
  }
  if (labels_) {
    require(labels_->size() == n_, ErrorKind::kInvalidInput,
            "label count does not match vertex count");
  }
}

WeightedGraph WeightedGraph::with_boundary(std::vector<std::uint32_t> boundary) const {
  return WeightedGraph(n_, edges_, std::move(boundary), labels_);
}

std::vector<std::size_t> WeightedGraph::components() const {
  UnionFind uf(n_);
  for (const Edge& e : edges_) uf.unite(e.i, e.j);
  std::vector<std::size_t> id(n_);
  std::vector<std::size_t> root_to_id(n_, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t v = 0; v < n_; ++v) {
    const std::size_t r = uf.find(v);
    if (root_to_id[r] == std::numeric_limits<std::size_t>::max()) {
      root_to_id[r] = next++;
    }
    id[v] = root_to_id[r];
  }
  return id;
}

std::size_t WeightedGraph::n_components() const {
  const auto id = components();
  return id.empty() ? 0 : *std::max_element(id.begin(), id.end()) + 1;
}

std::vector<double> WeightedGraph::bfs_distance(
    const std::vector<std::uint32_t>& sources) const {
  std::vector<std::vector<std::uint32_t>> adj(n_);
  for (const Edge& e : edges_) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<double> dist(n_, -1.0);
  std::deque<std::uint32_t> queue;
  for (auto s : sources) {
    require(s < n_, ErrorKind::kInvalidInput, "BFS source out of range");
    if (dist[s] < 0.0) {
      dist[s] = 0.0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : adj[v]) {
      if (dist[w] < 0.0) {
        dist[w] = dist[v] + 1.0;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

WeightedGraph path_graph(std::size_t n, std::vector<std::uint32_t> boundary) {
  require(n >= 2, ErrorKind::kInvalidInput, "path graph needs at least 2 vertices");
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return WeightedGraph(n, std::move(edges), std::move(boundary));
}

WeightedGraph grid_graph(std::size_t rows, std::size_t cols,
                         bool boundary_is_border) {
  require(rows >= 1 && cols >= 1 && rows * cols >= 2, ErrorKind::kInvalidInput,
          "grid graph needs at least 2 vertices");
  std::vector<Edge> edges;
  std::vector<std::uint32_t> border;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = static_cast<std::uint32_t>(r * cols + c);
      if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) {
        edges.push_back({v, static_cast<std::uint32_t>(v + cols), 1.0});
      }
      if (r == 0 || c == 0 || r + 1 == rows || c + 1 == cols) border.push_back(v);
    }
  }
  if (!boundary_is_border) border.clear();
  return WeightedGraph(rows * cols, std::move(edges), std::move(border));
}

WeightedGraph two_moons(std::size_t n_per_moon, double noise_std, std::size_t k,
                        std::uint64_t seed) {
  require(n_per_moon >= 10, ErrorKind::kInvalidInput, "two_moons: n_per_moon < 10");
  require(k >= 2, ErrorKind::kInvalidInput, "two_moons: k < 2");
  require(noise_std >= 0.0 && std::isfinite(noise_std), ErrorKind::kInvalidInput,
          "two_moons: noise_std must be nonnegative");
  const std::size_t n = 2 * n_per_moon;
  require(k < n, ErrorKind::kInvalidInput, "two_moons: k must be below vertex count");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n), y(n);
  std::vector<int> labels(n);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t i = 0; i < n_per_moon; ++i) {
      const double t = std::numbers::pi * static_cast<double>(i) /
                       static_cast<double>(n_per_moon - 1);
      const std::size_t v = m * n_per_moon + i;
      if (m == 0) {
        x[v] = std::cos(t);
        y[v] = std::sin(t);
      } else {
        x[v] = 1.0 - std::cos(t);
        y[v] = 0.5 - std::sin(t);
      }
      labels[v] = static_cast<int>(m);
    }
  }
  if (noise_std > 0.0) {
    for (std::size_t v = 0; v < n; ++v) {
      x[v] += noise_std * gauss(rng);
      y[v] += noise_std * gauss(rng);
    }
  }
  auto dist = [&](std::size_t a, std::size_t b) {
    return std::hypot(x[a] - x[b], y[a] - y[b]);
  };

  // k nearest neighbours, ties broken by index.
  std::vector<std::vector<std::size_t>> knn(n);
  std::vector<double> knn_dists;
  knn_dists.reserve(n * k);
  std::vector<std::size_t> order(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k + 1),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        const double da = dist(v, a), db = dist(v, b);
                        return da < db || (da == db && a < b);
                      });
    for (std::size_t r = 0, taken = 0; taken < k; ++r) {
      if (order[r] == v) continue;
      knn[v].push_back(order[r]);
      knn_dists.push_back(dist(v, order[r]));
      ++taken;
    }
  }
  std::vector<double> sorted = knn_dists;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double sigma = sorted[sorted.size() / 2];
  require(sigma > 0.0, ErrorKind::kConstructionFailure,
          "two_moons: median k-NN distance is zero");

  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : knn[v]) {
      pairs.emplace(static_cast<std::uint32_t>(std::min(v, w)),
                    static_cast<std::uint32_t>(std::max(v, w)));
    }
  }
  auto weight = [&](std::size_t a, std::size_t b) {
    const double d = dist(a, b);
    return std::exp(-d * d / (sigma * sigma));
  };

  // Link components by their closest pair until connected.
  for (std::size_t attempt = 0; attempt < n; ++attempt) {
    UnionFind uf(n);
    for (const auto& [a, b] : pairs) uf.unite(a, b);
    std::vector<std::size_t> in_first, others;
    for (std::size_t v = 0; v < n; ++v) {
      (uf.find(v) == uf.find(0) ? in_first : others).push_back(v);
    }
    if (others.empty()) break;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> link{0, 0};
    for (auto a : in_first) {
      for (auto b : others) {
        if (dist(a, b) < best) {
          best = dist(a, b);
          link = {a, b};
        }
      }
    }
    pairs.emplace(static_cast<std::uint32_t>(std::min(link.first, link.second)),
                  static_cast<std::uint32_t>(std::max(link.first, link.second)));
  }

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back({a, b, weight(a, b)});
  WeightedGraph g(n, std::move(edges), {}, std::move(labels));
  require(g.connected(), ErrorKind::kConstructionFailure,
          "two_moons: graph still disconnected after repair");
  return g;
}

}  // namespace proxeig
