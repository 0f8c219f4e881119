#pragma once

// Data-parallel inner loops. Every kernel exists twice: the OpenMP version in
// proxeig::kernels (used by the library) and a plain loop in
// proxeig::kernels::serial kept as the reference for tests and benchmarks.
//
// Reductions in the parallel path are blocked with a fixed block size and the
// block partials are summed in order, so results do not depend on the number
// of threads.

#include <cstddef>
#include <cstdint>
#include <span>

namespace proxeig::kernels {

inline constexpr std::size_t kReduceBlock = 2048;

/// Edge list of a weighted graph in structure-of-arrays form.
struct EdgeView {
  std::span<const std::uint32_t> head;  // i
  std::span<const std::uint32_t> tail;  // j
  std::span<const double> sqrt_w;
};

/// Vertex -> incident edge map (CSR). coef is +sqrt(w) when the vertex is the
/// head of the edge and -sqrt(w) when it is the tail.
struct IncidenceView {
  std::span<const std::size_t> offsets;  // n_vertices + 1
  std::span<const std::uint32_t> edge;
  std::span<const double> coef;
};

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double max_abs(std::span<const double> a);
double sum_abs(std::span<const double> a);
double sum_pow_abs(std::span<const double> a, double p);

/// y <- a*x + b*y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);

/// Forward differences on a rows x cols grid. Output holds the horizontal
/// differences in [0, rc) and the vertical ones in [rc, 2rc); the last column
/// (resp. row) is zero.
void grid_gradient(std::span<const double> u, std::size_t rows,
                   std::size_t cols, std::span<double> out);
/// Exact adjoint of grid_gradient (negative divergence).
void grid_gradient_adjoint(std::span<const double> p, std::size_t rows,
                           std::size_t cols, std::span<double> out);

void graph_gradient(std::span<const double> u, const EdgeView& edges,
                    std::span<double> out);
void graph_gradient_adjoint(std::span<const double> p, const EdgeView& edges,
                            const IncidenceView& inc, std::span<double> out);

/// out = A x with A row-major rows x cols.
void dense_matvec(std::span<const double> a, std::size_t rows,
                  std::size_t cols, std::span<const double> x,
                  std::span<double> out);
/// out = A^T x.
void dense_matvec_transposed(std::span<const double> a, std::size_t rows,
                             std::size_t cols, std::span<const double> x,
                             std::span<double> out);

/// q_i <- clamp(q_i, -r, r)
void clip_box(std::span<double> q, double r);

/// Primal half-step of the primal-dual iteration for
///   min_v 1/2||v - u||^2 + alpha ||D v||
///   v_new = (v - tau*dtq + tau*u) / (1 + tau), zeroed where mask != 0
///   vbar  = 2 v_new - v
/// v is overwritten with v_new.
void pdhg_primal_step(std::span<double> v, std::span<const double> dtq,
                      std::span<const double> u, double tau,
                      std::span<const unsigned char> mask,
                      std::span<double> vbar);

/// q <- q + sigma * dv
void pdhg_dual_ascent(std::span<double> q, std::span<const double> dv,
                      double sigma);

void relu_inplace(std::span<double> x);

namespace serial {

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double max_abs(std::span<const double> a);
double sum_abs(std::span<const double> a);
double sum_pow_abs(std::span<const double> a, double p);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void grid_gradient(std::span<const double> u, std::size_t rows,
                   std::size_t cols, std::span<double> out);
void grid_gradient_adjoint(std::span<const double> p, std::size_t rows,
                           std::size_t cols, std::span<double> out);
void graph_gradient(std::span<const double> u, const EdgeView& edges,
                    std::span<double> out);
/// Scatter over edges; ignores the incidence map.
void graph_gradient_adjoint(std::span<const double> p, const EdgeView& edges,
                            const IncidenceView& inc, std::span<double> out);
void dense_matvec(std::span<const double> a, std::size_t rows,
                  std::size_t cols, std::span<const double> x,
                  std::span<double> out);
void dense_matvec_transposed(std::span<const double> a, std::size_t rows,
                             std::size_t cols, std::span<const double> x,
                             std::span<double> out);
void clip_box(std::span<double> q, double r);
void pdhg_primal_step(std::span<double> v, std::span<const double> dtq,
                      std::span<const double> u, double tau,
                      std::span<const unsigned char> mask,
                      std::span<double> vbar);
void pdhg_dual_ascent(std::span<double> q, std::span<const double> dv,
                      double sigma);
void relu_inplace(std::span<double> x);

}  // namespace serial

}  // namespace proxeig::kernels
