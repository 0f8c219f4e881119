#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "proxeig/graph.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  static DenseMatrix identity(std::size_t n);
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }
};

/// One of: grid forward-difference gradient, graph edge gradient, explicit
/// dense matrix. Immutable after construction.
class LinearOp {
 public:
  enum class Kind { kGridGradient, kGraphGradient, kDense };

  static LinearOp grid_gradient(std::size_t rows, std::size_t cols);
  static LinearOp graph_gradient(const WeightedGraph& graph);
  static LinearOp dense(DenseMatrix matrix);

  Kind kind() const;
  std::size_t in_size() const;
  std::size_t out_size() const;

  void apply(std::span<const double> u, std::span<double> out) const;
  void adjoint(std::span<const double> p, std::span<double> out) const;

  std::vector<double> apply(std::span<const double> u) const;
  std::vector<double> adjoint(std::span<const double> p) const;

  /// Largest singular value by power iteration on D^T D, padded by 0.5% so it
  /// is an upper bound once the iteration has settled.
  double norm_estimate(int max_iters = 3000, double tol = 1e-12) const;

  /// Grid dimensions for kGridGradient, {0, 0} otherwise.
  std::pair<std::size_t, std::size_t> grid_dims() const;
  const DenseMatrix* dense_matrix() const;

 private:
  struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
  };
  struct Graph {
    std::size_t n = 0;
    std::vector<std::uint32_t> head, tail;
    std::vector<double> sqrt_w;
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> inc_edge;
    std::vector<double> inc_coef;
  };

  explicit LinearOp(std::variant<Grid, Graph, DenseMatrix> impl)
      : impl_(std::move(impl)) {}

  std::variant<Grid, Graph, DenseMatrix> impl_;
};

}  // namespace proxeig
