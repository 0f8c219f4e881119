#include "proxeig/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace proxeig::kernels::serial {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double sum_abs(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += std::abs(x);
  return s;
}

double sum_pow_abs(std::span<const double> a, double p) {
  double s = 0.0;
  for (double x : a) s += std::pow(std::abs(x), p);
  return s;
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a * x[i] + b * y[i];
}

void grid_gradient(std::span<const double> u, std::size_t rows,
                   std::size_t cols, std::span<double> out) {
  const std::size_t n = rows * cols;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = i * cols + j;
      out[k] = (j + 1 < cols) ? u[k + 1] - u[k] : 0.0;
      out[n + k] = (i + 1 < rows) ? u[k + cols] - u[k] : 0.0;
    }
  }
}

void grid_gradient_adjoint(std::span<const double> p, std::size_t rows,
                           std::size_t cols, std::span<double> out) {
  const std::size_t n = rows * cols;
  std::fill(out.begin(), out.end(), 0.0);
  // Transpose of the stencil, edge by edge.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = i * cols + j;
      if (j + 1 < cols) {
        out[k + 1] += p[k];
        out[k] -= p[k];
      }
      if (i + 1 < rows) {
        out[k + cols] += p[n + k];
        out[k] -= p[n + k];
      }
    }
  }
}

void graph_gradient(std::span<const double> u, const EdgeView& edges,
                    std::span<double> out) {
  for (std::size_t e = 0; e < edges.head.size(); ++e) {
    out[e] = edges.sqrt_w[e] * (u[edges.head[e]] - u[edges.tail[e]]);
  }
}

void graph_gradient_adjoint(std::span<const double> p, const EdgeView& edges,
                            const IncidenceView& /*inc*/,
                            std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < edges.head.size(); ++e) {
    out[edges.head[e]] += edges.sqrt_w[e] * p[e];
    out[edges.tail[e]] -= edges.sqrt_w[e] * p[e];
  }
}

void dense_matvec(std::span<const double> a, std::size_t rows,
                  std::size_t cols, std::span<const double> x,
                  std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += a[i * cols + j] * x[j];
    out[i] = s;
  }
}

void dense_matvec_transposed(std::span<const double> a, std::size_t rows,
                             std::size_t cols, std::span<const double> x,
                             std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j] += a[i * cols + j] * x[i];
  }
}

void clip_box(std::span<double> q, double r) {
  for (double& x : q) x = std::clamp(x, -r, r);
}

void pdhg_primal_step(std::span<double> v, std::span<const double> dtq,
                      std::span<const double> u, double tau,
                      std::span<const unsigned char> mask,
                      std::span<double> vbar) {
  const double inv = 1.0 / (1.0 + tau);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double next = (v[i] - tau * dtq[i] + tau * u[i]) * inv;
    if (!mask.empty() && mask[i]) next = 0.0;
    vbar[i] = 2.0 * next - v[i];
    v[i] = next;
  }
}

void pdhg_dual_ascent(std::span<double> q, std::span<const double> dv,
                      double sigma) {
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += sigma * dv[i];
}

void relu_inplace(std::span<double> x) {
  for (double& v : x) v = std::max(v, 0.0);
}

}  // namespace proxeig::kernels::serial
