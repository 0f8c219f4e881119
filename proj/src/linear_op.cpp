#include "proxeig/linear_op.hpp"

#include <cmath>
#include <random>

#include "proxeig/error.hpp"
#include "proxeig/kernels.hpp"

namespace proxeig {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m{n, n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] = 1.0;
  return m;
}

LinearOp LinearOp::grid_gradient(std::size_t rows, std::size_t cols) {
  require(rows >= 1 && cols >= 1, ErrorKind::kInvalidInput,
          "grid gradient needs a nonempty grid");
  return LinearOp(Grid{rows, cols});
}

LinearOp LinearOp::graph_gradient(const WeightedGraph& graph) {
  Graph g;
  g.n = graph.n_vertices();
  const auto& edges = graph.edges();
  g.head.reserve(edges.size());
  g.tail.reserve(edges.size());
  g.sqrt_w.reserve(edges.size());
  for (const Edge& e : edges) {
    g.head.push_back(e.i);
    g.tail.push_back(e.j);
    g.sqrt_w.push_back(std::sqrt(e.w));
  }
  std::vector<std::size_t> degree(g.n, 0);
  for (const Edge& e : edges) {
    ++degree[e.i];
    ++degree[e.j];
  }
  g.offsets.assign(g.n + 1, 0);
  for (std::size_t v = 0; v < g.n; ++v) g.offsets[v + 1] = g.offsets[v] + degree[v];
  g.inc_edge.resize(g.offsets.back());
  g.inc_coef.resize(g.offsets.back());
  std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto i = edges[e].i, j = edges[e].j;
    g.inc_edge[fill[i]] = static_cast<std::uint32_t>(e);
    g.inc_coef[fill[i]++] = g.sqrt_w[e];
    g.inc_edge[fill[j]] = static_cast<std::uint32_t>(e);
    g.inc_coef[fill[j]++] = -g.sqrt_w[e];
  }
  return LinearOp(std::move(g));
}

LinearOp LinearOp::dense(DenseMatrix matrix) {
  require(matrix.rows * matrix.cols == matrix.data.size() && matrix.rows > 0 &&
              matrix.cols > 0,
          ErrorKind::kInvalidInput, "dense matrix dimensions do not match data");
  for (double x : matrix.data) {
    require(std::isfinite(x), ErrorKind::kInvalidInput, "dense matrix has non-finite entry");
  }
  return LinearOp(std::move(matrix));
}

LinearOp::Kind LinearOp::kind() const {
  switch (impl_.index()) {
    case 0: return Kind::kGridGradient;
    case 1: return Kind::kGraphGradient;
    default: return Kind::kDense;
  }
}

std::size_t LinearOp::in_size() const {
  if (const auto* g = std::get_if<Grid>(&impl_)) return g->rows * g->cols;
  if (const auto* g = std::get_if<Graph>(&impl_)) return g->n;
  return std::get<DenseMatrix>(impl_).cols;
}

std::size_t LinearOp::out_size() const {
  if (const auto* g = std::get_if<Grid>(&impl_)) return 2 * g->rows * g->cols;
  if (const auto* g = std::get_if<Graph>(&impl_)) return g->head.size();
  return std::get<DenseMatrix>(impl_).rows;
}

namespace {

kernels::EdgeView edge_view(const auto& g) {
  return {g.head, g.tail, g.sqrt_w};
}
kernels::IncidenceView incidence_view(const auto& g) {
  return {g.offsets, g.inc_edge, g.inc_coef};
}

}  // namespace

void LinearOp::apply(std::span<const double> u, std::span<double> out) const {
  require(u.size() == in_size() && out.size() == out_size(),
          ErrorKind::kInvalidInput, "linear operator: size mismatch");
  if (const auto* g = std::get_if<Grid>(&impl_)) {
    kernels::grid_gradient(u, g->rows, g->cols, out);
  } else if (const auto* g = std::get_if<Graph>(&impl_)) {
    kernels::graph_gradient(u, edge_view(*g), out);
  } else {
    const auto& m = std::get<DenseMatrix>(impl_);
    kernels::dense_matvec(m.data, m.rows, m.cols, u, out);
  }
}

void LinearOp::adjoint(std::span<const double> p, std::span<double> out) const {
  require(p.size() == out_size() && out.size() == in_size(),
          ErrorKind::kInvalidInput, "linear operator adjoint: size mismatch");
  if (const auto* g = std::get_if<Grid>(&impl_)) {
    kernels::grid_gradient_adjoint(p, g->rows, g->cols, out);
  } else if (const auto* g = std::get_if<Graph>(&impl_)) {
    kernels::graph_gradient_adjoint(p, edge_view(*g), incidence_view(*g), out);
  } else {
    const auto& m = std::get<DenseMatrix>(impl_);
    kernels::dense_matvec_transposed(m.data, m.rows, m.cols, p, out);
  }
}

std::vector<double> LinearOp::apply(std::span<const double> u) const {
  std::vector<double> out(out_size());
  apply(u, out);
  return out;
}

std::vector<double> LinearOp::adjoint(std::span<const double> p) const {
  std::vector<double> out(in_size());
  adjoint(p, out);
  return out;
}

double LinearOp::norm_estimate(int max_iters, double tol) const {
  const std::size_t n = in_size();
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> x(n), y(out_size()), z(n);
  for (double& v : x) v = unif(rng);
  double nx = std::sqrt(kernels::dot(x, x));
  for (double& v : x) v /= nx;
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    apply(x, y);
    adjoint(y, z);
    const double next = kernels::dot(x, z);
    const double nz = std::sqrt(kernels::dot(z, z));
    if (nz == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
    const bool settled = std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (settled) break;
  }
  return std::sqrt(lambda) * 1.005;
}

std::pair<std::size_t, std::size_t> LinearOp::grid_dims() const {
  if (const auto* g = std::get_if<Grid>(&impl_)) return {g->rows, g->cols};
  return {0, 0};
}

const DenseMatrix* LinearOp::dense_matrix() const {
  return std::get_if<DenseMatrix>(&impl_);
}

}  // namespace proxeig
