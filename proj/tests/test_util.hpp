#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "proxeig/graph.hpp"
#include "proxeig/linear_op.hpp"
#include "proxeig/signal.hpp"

namespace proxeig::testing {

inline std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

inline Signal gaussian_signal(Shape shape, std::uint64_t seed, double sd = 1.0) {
  return Signal(gaussian_vector(shape.size(), seed, sd), shape);
}

inline Eigen::VectorXd to_eigen(const Signal& s) {
  return Eigen::Map<const Eigen::VectorXd>(s.data().data(), Eigen::Index(s.size()));
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd a(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) a(Eigen::Index(i), Eigen::Index(j)) = m(i, j);
  return a;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& a) {
  DenseMatrix m{std::size_t(a.rows()), std::size_t(a.cols()), {}};
  m.data.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m.data[i * m.cols + j] = a(Eigen::Index(i), Eigen::Index(j));
  return m;
}

/// Random symmetric positive definite matrix with a clear spectral gap.
inline Eigen::MatrixXd random_spd(int n, std::uint64_t seed) {
  const auto v = gaussian_vector(std::size_t(n * n), seed);
  Eigen::MatrixXd b = Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
  Eigen::MatrixXd a = b * b.transpose() + Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(n, 1.0, 0.2);
  return a * 0.1 + Eigen::MatrixXd(d.asDiagonal()) * double(n);
}

/// Explicit edge-difference matrix of a graph, one row per edge in order.
inline Eigen::MatrixXd incidence_matrix(const WeightedGraph& g) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(Eigen::Index(g.n_edges()), Eigen::Index(g.n_vertices()));
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    const auto& ed = g.edges()[e];
    const double s = std::sqrt(ed.w);
    d(Eigen::Index(e), ed.i) = s;
    d(Eigen::Index(e), ed.j) = -s;
  }
  return d;
}

inline double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd an = a.normalized(), bn = b.normalized();
  return 2.0 * std::atan2((an - bn).norm(), (an + bn).norm()) * 180.0 / M_PI;
}

}  // namespace proxeig::testing
