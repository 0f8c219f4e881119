#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "proxeig/graph.hpp"
#include "proxeig/kernels.hpp"
#include "test_util.hpp"

namespace pk = proxeig::kernels;
using proxeig::testing::gaussian_vector;

namespace {

// Sizes straddling the reduction block so both the single-block and the
// multi-block paths run.
const std::vector<std::size_t> kSizes{1, 7, 2047, 2048, 2049, 10000};

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-13) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], tol) << "index " << i;
}

struct GraphViews {
  std::vector<std::uint32_t> head, tail, inc_edge;
  std::vector<double> sqrt_w, coef;
  std::vector<std::size_t> offsets;
  pk::EdgeView edges() const { return {head, tail, sqrt_w}; }
  pk::IncidenceView incidence() const { return {offsets, inc_edge, coef}; }
};

GraphViews views_of(const proxeig::WeightedGraph& g) {
  GraphViews v;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(g.n_vertices());
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    const auto& ed = g.edges()[e];
    v.head.push_back(ed.i);
    v.tail.push_back(ed.j);
    v.sqrt_w.push_back(std::sqrt(ed.w));
    adj[ed.i].push_back({std::uint32_t(e), std::sqrt(ed.w)});
    adj[ed.j].push_back({std::uint32_t(e), -std::sqrt(ed.w)});
  }
  v.offsets.push_back(0);
  for (const auto& a : adj) {
    for (const auto& [e, c] : a) {
      v.inc_edge.push_back(e);
      v.coef.push_back(c);
    }
    v.offsets.push_back(v.inc_edge.size());
  }
  return v;
}

}  // namespace

TEST(Kernels, ReductionsMatchSerial) {
  for (std::size_t n : kSizes) {
    const auto a = gaussian_vector(n, 1 + n), b = gaussian_vector(n, 2 + n);
    EXPECT_LT(rel_diff(pk::dot(a, b), pk::serial::dot(a, b)), 1e-12) << n;
    EXPECT_LT(rel_diff(pk::sum(a), pk::serial::sum(a)), 1e-12) << n;
    EXPECT_EQ(pk::max_abs(a), pk::serial::max_abs(a)) << n;
    EXPECT_LT(rel_diff(pk::sum_abs(a), pk::serial::sum_abs(a)), 1e-12) << n;
    EXPECT_LT(rel_diff(pk::sum_pow_abs(a, 3.0), pk::serial::sum_pow_abs(a, 3.0)), 1e-12) << n;
  }
}

TEST(Kernels, ReductionsAreRepeatable) {
  const auto a = gaussian_vector(50000, 3), b = gaussian_vector(50000, 4);
  const double first = pk::dot(a, b);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(pk::dot(a, b), first);
}

TEST(Kernels, ElementwiseMatchSerial) {
  for (std::size_t n : kSizes) {
    const auto x = gaussian_vector(n, 5 + n);
    auto y1 = gaussian_vector(n, 6 + n), y2 = y1;
    pk::axpby(0.3, x, -1.7, y1);
    pk::serial::axpby(0.3, x, -1.7, y2);
    expect_close(y1, y2, 0.0);

    auto q1 = gaussian_vector(n, 7 + n), q2 = q1;
    pk::clip_box(q1, 0.5);
    pk::serial::clip_box(q2, 0.5);
    expect_close(q1, q2, 0.0);

    auto r1 = x, r2 = x;
    pk::relu_inplace(r1);
    pk::serial::relu_inplace(r2);
    expect_close(r1, r2, 0.0);

    auto d1 = gaussian_vector(n, 8 + n), d2 = d1;
    pk::pdhg_dual_ascent(d1, x, 0.25);
    pk::serial::pdhg_dual_ascent(d2, x, 0.25);
    expect_close(d1, d2, 0.0);
  }
}

TEST(Kernels, PrimalStepMatchesSerialWithMask) {
  const std::size_t n = 3001;
  const auto dtq = gaussian_vector(n, 9), u = gaussian_vector(n, 10);
  std::vector<unsigned char> mask(n, 0);
  for (std::size_t i = 0; i < n; i += 7) mask[i] = 1;
  auto v1 = gaussian_vector(n, 11), v2 = v1;
  std::vector<double> b1(n), b2(n);
  pk::pdhg_primal_step(v1, dtq, u, 0.4, mask, b1);
  pk::serial::pdhg_primal_step(v2, dtq, u, 0.4, mask, b2);
  expect_close(v1, v2, 0.0);
  expect_close(b1, b2, 0.0);
  for (std::size_t i = 0; i < n; i += 7) EXPECT_EQ(v1[i], 0.0);
}

TEST(Kernels, GridGradientMatchesSerialAndIsAdjoint) {
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 5}, {64, 64}, {17, 130}}) {
    const std::size_t n = rows * cols;
    const auto u = gaussian_vector(n, 12), p = gaussian_vector(2 * n, 13);
    std::vector<double> g1(2 * n), g2(2 * n), a1(n), a2(n);
    pk::grid_gradient(u, rows, cols, g1);
    pk::serial::grid_gradient(u, rows, cols, g2);
    expect_close(g1, g2, 0.0);
    pk::grid_gradient_adjoint(p, rows, cols, a1);
    pk::serial::grid_gradient_adjoint(p, rows, cols, a2);
    expect_close(a1, a2, 1e-14);
    EXPECT_LT(rel_diff(pk::serial::dot(g1, p), pk::serial::dot(u, a1)), 1e-12);
  }
}

TEST(Kernels, GridGradientValues) {
  // 2 x 3 grid, row-major.
  const std::vector<double> u{1, 2, 4, 8, 16, 32};
  std::vector<double> g(12);
  pk::grid_gradient(u, 2, 3, g);
  const std::vector<double> expected{1, 2, 0, 8, 16, 0, 7, 14, 28, 0, 0, 0};
  expect_close(g, expected, 0.0);
}

TEST(Kernels, GraphGradientMatchesSerialAndIsAdjoint) {
  const auto g = proxeig::two_moons(60, 0.08, 8, 3);
  const GraphViews v = views_of(g);
  const auto u = gaussian_vector(g.n_vertices(), 14), p = gaussian_vector(g.n_edges(), 15);
  std::vector<double> d1(g.n_edges()), d2(g.n_edges()), a1(g.n_vertices()), a2(g.n_vertices());
  pk::graph_gradient(u, v.edges(), d1);
  pk::serial::graph_gradient(u, v.edges(), d2);
  expect_close(d1, d2, 0.0);
  pk::graph_gradient_adjoint(p, v.edges(), v.incidence(), a1);
  pk::serial::graph_gradient_adjoint(p, v.edges(), v.incidence(), a2);
  expect_close(a1, a2, 1e-13);
  EXPECT_LT(rel_diff(pk::serial::dot(d1, p), pk::serial::dot(u, a1)), 1e-12);
}

TEST(Kernels, DenseMatvecMatchesSerialAndEigen) {
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {5, 3}, {200, 170}}) {
    const auto a = gaussian_vector(rows * cols, 16);
    const auto x = gaussian_vector(cols, 17), y = gaussian_vector(rows, 18);
    std::vector<double> o1(rows), o2(rows), t1(cols), t2(cols);
    pk::dense_matvec(a, rows, cols, x, o1);
    pk::serial::dense_matvec(a, rows, cols, x, o2);
    expect_close(o1, o2, 1e-12);
    pk::dense_matvec_transposed(a, rows, cols, y, t1);
    pk::serial::dense_matvec_transposed(a, rows, cols, y, t2);
    expect_close(t1, t2, 1e-12);

    const Eigen::MatrixXd A = Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(
        a.data(), Eigen::Index(rows), Eigen::Index(cols));
    const Eigen::VectorXd ex = A * Eigen::Map<const Eigen::VectorXd>(x.data(), Eigen::Index(cols));
    const Eigen::VectorXd et = A.transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), Eigen::Index(rows));
    for (std::size_t i = 0; i < rows; ++i) EXPECT_NEAR(o1[i], ex(Eigen::Index(i)), 1e-11);
    for (std::size_t j = 0; j < cols; ++j) EXPECT_NEAR(t1[j], et(Eigen::Index(j)), 1e-11);
  }
}
