#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "proxeig/functional.hpp"
#include "proxeig/operator.hpp"
#include "proxeig/prox.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

enum class Status {
  kConverged,  // ||u^{k+1} - u^k|| < eps
  kMaxIters,
  kKernelHit,  // T(u^k) = 0; u^k is reported as the result
  kStalled,    // proximal power: no step size decreased the energy any more
};

const char* to_string(Status s);

/// One row per iteration k, evaluated at the iterate u^k and its image T(u^k)
/// (v^k for the proximal method). Absent values are empty optionals.
struct TraceRecord {
  int k = 0;
  double rayleigh = 0.0;
  std::optional<double> rayleigh_dagger;
  std::optional<double> angle_deg;
  std::optional<double> affinity;
  std::optional<double> energy_J;          // J(u^k)
  std::optional<double> alpha;             // step actually used
  std::optional<double> collinearity_gap;  // ||v^k|| - <v^k, u^k>
  double step_norm = 0.0;                  // ||u^{k+1} - u^k||
  double t_norm = 0.0;                     // ||T(u^k)||
};

struct IterationTrace {
  std::vector<TraceRecord> records;
  Status status = Status::kMaxIters;
  std::string message;
};

struct PowerOptions {
  double eps = 1e-8;
  int max_iters = 2000;
  /// Called with (k, u^k) before every application of T.
  std::function<void(int, const Signal&)> on_iterate;
};

struct PowerResult {
  Signal u;              // final iterate u*
  double lambda = 0.0;   // R(u*), ||v_last||, or R_dagger(u*) depending on method
  double angle_deg = 0.0;  // angle between u* and T(u*) (90 if T(u*) = 0)
  int iters = 0;
  double wall_ms = 0.0;
  IterationTrace trace;

  /// proximal_power: J(u0) and J(u*), and the component of f removed by the
  /// null-space projection.
  std::optional<double> energy_initial;
  std::optional<double> energy_final;
  std::optional<Signal> removed_null_component;
  /// range_power: relaxed eigen-residual of u* with lambda.
  std::optional<double> relaxed_residual;
};

/// u^{k+1} = T(u^k)/||T(u^k)||, u^0 = f/||f||, stopped when
/// ||u^{k+1} - u^k|| < eps. lambda = R(u*). When T(u^k) vanishes the run ends
/// with kKernelHit, u* = u^k and lambda = 0.
PowerResult simple_power(OperatorHandle T, const Signal& f, const PowerOptions& opts = {});

/// u^0 = P f/||P f|| with P the projection onto N(J)^perp,
/// v^k = prox_{alpha(u^k)}(u^k) (with energy backtracking),
/// u^{k+1} = v^k/||v^k||. lambda = ||v^last||.
///
/// Throws kNullSpaceInput when J(P f) = 0 and kRuleViolation when a prox step
/// extinguishes the iterate. Exhausted backtracking ends the run with
/// kStalled.
PowerResult proximal_power(const Functional& J, const ParameterRule& rule,
                           const Signal& f, const PowerOptions& opts = {},
                           const ProxConfig& cfg = {});

/// Range-sensitive iteration for operators that need not map to a fixed
/// scale: the centered part of T(u^k) is rescaled to ||u^0 - mean(u^0)|| and
/// mean(u^k) is added back. lambda = R_dagger(u*).
///
/// Throws kInvalidInput for constant f and kDegenerateOutput when T(u^k) is
/// constant.
PowerResult range_power(OperatorHandle T, const Signal& f, const PowerOptions& opts = {});

enum class RestartMethod { kSimple, kRange };

/// Runs n_proj_iters steps of the chosen method with the known modes projected
/// out after every application of T (of the centered part for kRange), then
/// continues with the unconstrained method from that iterate. The projection
/// trace rows come first in the returned trace.
///
/// Throws kRestartFailure when the projection annihilates the iterate.
PowerResult restart_orthogonal(OperatorHandle T, const Signal& f,
                               const std::vector<Signal>& known_modes,
                               int n_proj_iters, RestartMethod method,
                               const PowerOptions& opts = {});

/// <T(u), 1> / <u, 1> for u >= 0; 1 when T preserves the mean on u.
double unbiased_lambda_check(OperatorHandle T, const Signal& u);

}  // namespace proxeig
