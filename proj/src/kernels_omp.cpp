#include "proxeig/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace proxeig::kernels {

namespace {

using Index = std::ptrdiff_t;

// Sum f(i) over [0, n) in fixed blocks; partials are combined serially.
template <typename F>
double blocked_sum(std::size_t n, F&& f) {
  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  if (nblocks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(i);
    return s;
  }
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < static_cast<Index>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[b] = s;
  }
  double s = 0.0;
  for (double x : partial) s += x;
  return s;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double sum(std::span<const double> a) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i]; });
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (Index i = 0; i < static_cast<Index>(a.size()); ++i) {
    m = std::max(m, std::abs(a[i]));
  }
  return m;
}

double sum_abs(std::span<const double> a) {
  return blocked_sum(a.size(), [&](std::size_t i) { return std::abs(a[i]); });
}

double sum_pow_abs(std::span<const double> a, double p) {
  return blocked_sum(a.size(),
                     [&](std::size_t i) { return std::pow(std::abs(a[i]), p); });
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(y.size()); ++i) {
    y[i] = a * x[i] + b * y[i];
  }
}

void grid_gradient(std::span<const double> u, std::size_t rows,
                   std::size_t cols, std::span<double> out) {
  const std::size_t n = rows * cols;
#pragma omp parallel for schedule(static)
  for (Index ii = 0; ii < static_cast<Index>(rows); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const std::size_t base = i * cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      out[base + j] = u[base + j + 1] - u[base + j];
    }
    out[base + cols - 1] = 0.0;
    if (i + 1 < rows) {
      for (std::size_t j = 0; j < cols; ++j) {
        out[n + base + j] = u[base + cols + j] - u[base + j];
      }
    } else {
      for (std::size_t j = 0; j < cols; ++j) out[n + base + j] = 0.0;
    }
  }
}

void grid_gradient_adjoint(std::span<const double> p, std::size_t rows,
                           std::size_t cols, std::span<double> out) {
  const std::size_t n = rows * cols;
  const double* px = p.data();
  const double* py = p.data() + n;
#pragma omp parallel for schedule(static)
  for (Index ii = 0; ii < static_cast<Index>(rows); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const std::size_t base = i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = base + j;
      double s = 0.0;
      if (j > 0) s += px[k - 1];
      if (j + 1 < cols) s -= px[k];
      if (i > 0) s += py[k - cols];
      if (i + 1 < rows) s -= py[k];
      out[k] = s;
    }
  }
}

void graph_gradient(std::span<const double> u, const EdgeView& edges,
                    std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Index e = 0; e < static_cast<Index>(edges.head.size()); ++e) {
    out[e] = edges.sqrt_w[e] * (u[edges.head[e]] - u[edges.tail[e]]);
  }
}

void graph_gradient_adjoint(std::span<const double> p, const EdgeView& /*edges*/,
                            const IncidenceView& inc, std::span<double> out) {
  const Index nv = static_cast<Index>(inc.offsets.size()) - 1;
#pragma omp parallel for schedule(static)
  for (Index v = 0; v < nv; ++v) {
    double s = 0.0;
    for (std::size_t k = inc.offsets[v]; k < inc.offsets[v + 1]; ++k) {
      s += inc.coef[k] * p[inc.edge[k]];
    }
    out[v] = s;
  }
}

void dense_matvec(std::span<const double> a, std::size_t rows,
                  std::size_t cols, std::span<const double> x,
                  std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(rows); ++i) {
    const double* row = a.data() + static_cast<std::size_t>(i) * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

void dense_matvec_transposed(std::span<const double> a, std::size_t rows,
                             std::size_t cols, std::span<const double> x,
                             std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < static_cast<Index>(cols); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a[i * cols + j] * x[i];
    out[j] = s;
  }
}

void clip_box(std::span<double> q, double r) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(q.size()); ++i) {
    q[i] = std::clamp(q[i], -r, r);
  }
}

void pdhg_primal_step(std::span<double> v, std::span<const double> dtq,
                      std::span<const double> u, double tau,
                      std::span<const unsigned char> mask,
                      std::span<double> vbar) {
  const double inv = 1.0 / (1.0 + tau);
  const bool masked = !mask.empty();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(v.size()); ++i) {
    double next = (v[i] - tau * dtq[i] + tau * u[i]) * inv;
    if (masked && mask[i]) next = 0.0;
    vbar[i] = 2.0 * next - v[i];
    v[i] = next;
  }
}

void pdhg_dual_ascent(std::span<double> q, std::span<const double> dv,
                      double sigma) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(q.size()); ++i) {
    q[i] += sigma * dv[i];
  }
}

void relu_inplace(std::span<double> x) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(x.size()); ++i) {
    x[i] = std::max(x[i], 0.0);
  }
}

}  // namespace proxeig::kernels
