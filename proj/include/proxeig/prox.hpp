#pragma once

#include <vector>

#include "proxeig/functional.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

enum class InnerSolver {
  /// Accelerated projected gradient on the dual problem, with restarts.
  kDualGradient,
  /// Fixed-step primal-dual hybrid gradient, sigma = tau = 0.99/||D||.
  kPdhg,
};

struct ProxConfig {
  InnerSolver inner_solver = InnerSolver::kDualGradient;
  int inner_max_iters = 2000;
  /// Relative primal-dual gap, normalized by 1/2 ||u_perp||^2.
  double inner_tol = 1e-9;
  double backtrack_factor = 0.9;
  int backtrack_max = 30;
  /// Accepted when J(v)/||v|| <= J(u)/||u|| + decrease_slack.
  double decrease_slack = 1e-10;
  bool warm_start = true;

  void validate() const;
};

struct ProxResult {
  Signal v;
  double alpha_used = 0.0;
  int inner_iters = 0;
  double achieved_gap = 0.0;
  bool extinct = false;
  int backtracks = 0;
};

/// sign(u_i) max(|u_i| - alpha, 0).
Signal soft_threshold(const Signal& u, double alpha);

/// (1 - alpha mu)_+ u, the prox of an eigenvector u with mu u in dJ(u).
Signal prox_eigen_closed_form(const Signal& u, double mu, double alpha);

/// Evaluates prox_alpha^J(u) = argmin_v 1/2||v - u||^2 + alpha J(v).
///
/// l1 uses the closed-form shrinkage. Composite functionals ||D u||_p solve
/// the saddle problem
///
///   min_v max_{||q||_* <= alpha} 1/2||v - u||^2 + <D v, q>
///
/// iteratively (see InnerSolver) and stop on the primal-dual gap normalized
/// by 1/2||u_perp||^2. The null-space component of u is split off first and
/// added back to the result, so the inner problem always runs on u_perp.
///
/// The solver keeps the last dual variable and reuses it (rescaled to the new
/// alpha) on the next call. Use one instance per thread.
class ProxSolver {
 public:
  explicit ProxSolver(Functional J, ProxConfig cfg = {});

  ProxResult prox(const Signal& u, double alpha);

  /// Shrinks alpha by backtrack_factor until the Rayleigh-type ratio
  /// J(v)/||v|| does not increase. Extinct outputs are returned as is.
  /// Throws kNullSpaceInput when J(u) = 0 and kBacktrackExhausted when no
  /// step passes.
  ProxResult prox_backtracked(const Signal& u, double alpha);

  void reset_warm_start();
  const Functional& functional() const { return J_; }
  const ProxConfig& config() const { return cfg_; }

 private:
  ProxResult solve_composite(const Signal& u_perp, double alpha);
  void project_dual(std::vector<double>& q, double radius) const;

  Functional J_;
  ProxConfig cfg_;
  std::vector<double> dual_;
  double dual_alpha_ = 0.0;
};

/// Composite functionals only (kUnsupported for l1); fresh solver state.
ProxResult prox_composite(const Functional& J, const Signal& u, double alpha,
                          const ProxConfig& cfg = {});

/// prox_composite with the primal-dual solver selected.
ProxResult prox_pdhg(const Functional& J, const Signal& u, double alpha,
                     const ProxConfig& cfg = {});

ProxResult prox_backtracked(const Functional& J, const Signal& u, double alpha,
                            const ProxConfig& cfg = {});

/// Dual feasibility violation of r = (u - v)/alpha, i.e. how far r is from
/// the unit dual ball K = dJ(0). 0 means r is in K.
double moreau_residual_check(const Functional& J, const Signal& u,
                             const Signal& v, double alpha);

namespace detail {
/// Euclidean projections onto {||q||_s <= r}. Exposed for tests.
void project_l1_ball(std::vector<double>& q, double r);
void project_l2_ball(std::vector<double>& q, double r);
void project_lq_ball(std::vector<double>& q, double s, double r);
}  // namespace detail

}  // namespace proxeig
