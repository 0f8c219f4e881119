#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxeig/graph.hpp"
#include "proxeig/linear_op.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// An absolutely one-homogeneous convex functional J. Composite kinds are
/// J(u) = || D u ||_p over the edge stack of a linear operator D.
///
/// Immutable and cheap to copy (the operator is shared).
class Functional {
 public:
  enum class Kind { kL1, kAnisoTV, kGraphP, kDenseP };

  static Functional l1();
  static Functional aniso_tv(std::size_t rows, std::size_t cols);
  /// J_p(u) = (sum_e |sqrt(w_e)(u_i - u_j)|^p)^(1/p), or the max for p = inf.
  /// With zero_on_boundary the admissible space is {u : u = 0 on the graph's
  /// boundary set}.
  static Functional graph_p(const WeightedGraph& graph, double p,
                            bool zero_on_boundary);
  static Functional dense_p(DenseMatrix matrix, double p);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  bool composite() const { return kind_ != Kind::kL1; }
  const LinearOp& op() const;
  double op_norm() const { return op_norm_; }
  std::size_t dim() const { return dim_; }
  std::string describe() const;

  /// Vertices pinned to zero (graph boundary); empty when there are none.
  std::span<const unsigned char> fixed_zero_mask() const { return mask_; }

  double evaluate(const Signal& u) const;
  /// || e ||_p of an edge-space vector.
  double edge_norm(std::span<const double> e) const;
  /// Dual norm (exponent q with 1/p + 1/q = 1) of an edge-space vector.
  double edge_dual_norm(std::span<const double> e) const;

  /// Component of u in N(J)^perp (inside the admissible space). Subtracts the
  /// mean for AnisoTV, the per-component mean for graphs (components touching
  /// a pinned boundary are instead zeroed on the boundary), projects out the
  /// kernel for dense operators, identity for L1.
  Signal null_space_project(const Signal& u) const;

  /// True when J(u) is zero up to rounding relative to ||u||.
  bool is_null(const Signal& u) const;

  /// Throws kInvalidInput if u cannot be fed to this functional.
  void check_compatible(const Signal& u) const;

 private:
  Functional() = default;
  void init_composite(std::shared_ptr<const LinearOp> op, double p);

  Kind kind_ = Kind::kL1;
  double p_ = 1.0;
  std::size_t dim_ = 0;  // 0 = any length (L1)
  std::shared_ptr<const LinearOp> op_;
  double op_norm_ = 0.0;
  std::vector<unsigned char> mask_;
  std::vector<std::size_t> component_;
  std::vector<unsigned char> component_pinned_;
  std::size_t n_components_ = 0;
  std::shared_ptr<const std::vector<Signal>> null_basis_;
};

struct Subgradient {
  Signal p;
  double source_alpha = 0.0;
  /// The point p is a subgradient at (the prox output), when known.
  std::optional<Signal> at;
  /// Inner-solver gap achieved when the prox pair was computed.
  double achieved_gap = 0.0;
};

/// ||u||^2 / J(u), a lower bound for the dual seminorm J_*(u); kNullSpaceInput
/// when J(u) = 0.
double dual_norm_lower_bound(const Functional& J, const Signal& u);

/// max_i |u_i|, the dual of the l1 norm.
double dual_norm_exact_l1(const Signal& u);

/// p = (u - v) / alpha for v ~ prox_alpha(u).
Subgradient subgradient_from_prox(const Functional& J, const Signal& u,
                                  const Signal& v, double alpha,
                                  double achieved_gap = 0.0);

}  // namespace proxeig
