#include "proxeig/builtins.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "proxeig/error.hpp"

namespace proxeig {

Signal noisy_disk(std::size_t size, double noise_std, std::uint64_t seed) {
  require(size >= 4, ErrorKind::kInvalidInput, "noisy_disk: size must be >= 4");
  require(noise_std >= 0.0, ErrorKind::kInvalidInput, "noisy_disk: noise_std < 0");
  const double c = 0.5 * double(size - 1);
  const double r_in = 0.12 * double(size), r_out = 0.3 * double(size);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> data(size * size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double r = std::hypot(double(i) - c, double(j) - c);
      const double base = (r >= r_in && r <= r_out) ? 1.0 : 0.0;
      const double n = noise(rng);
      data[i * size + j] = base + noise_std * n;
    }
  }
  return Signal(std::move(data), Shape::image(size, size));
}

std::vector<Signal> pixel_basis(std::size_t rows, std::size_t cols, std::size_t k) {
  require(rows > 0 && cols > 0 && k > 0, ErrorKind::kInvalidInput,
          "pixel_basis: rows, cols and k must be positive");
  auto positions = [k](std::size_t extent) {
    std::vector<std::size_t> p;
    for (std::size_t i = 0; i < k; ++i) p.push_back((2 * i + 1) * extent / (2 * k));
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
  };
  const Shape shape = cols > 1 ? Shape::image(rows, cols) : Shape::flat(rows);
  std::vector<Signal> out;
  for (std::size_t r : positions(rows)) {
    for (std::size_t c : cols > 1 ? positions(cols) : std::vector<std::size_t>{0}) {
      Signal s = Signal::zeros(shape);
      s[r * cols + c] = 1.0;
      out.push_back(std::move(s));
    }
  }
  return out;
}

Signal random_signal(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> data(shape.size());
  for (double& x : data) x = dist(rng);
  return Signal(std::move(data), shape);
}

Signal fiedler_vector(const WeightedGraph& g) {
  const std::size_t n = g.n_vertices();
  require(n >= 2, ErrorKind::kInvalidInput, "fiedler_vector: need >= 2 vertices");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (const Edge& e : g.edges()) {
    L(e.i, e.i) += e.w;
    L(e.j, e.j) += e.w;
    L(e.i, e.j) -= e.w;
    L(e.j, e.i) -= e.w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  require(es.info() == Eigen::Success, ErrorKind::kSolverFailure,
          "fiedler_vector: eigensolver failed");
  Eigen::VectorXd v = es.eigenvectors().col(1);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return Signal(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace proxeig
