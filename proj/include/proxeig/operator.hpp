#pragma once

#include <functional>
#include <memory>
#include <string>

#include "proxeig/functional.hpp"
#include "proxeig/linear_op.hpp"
#include "proxeig/nets.hpp"
#include "proxeig/prox.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

/// Step-size schedule alpha(u) of the proximal power method.
struct ParameterRule {
  enum class Kind { kConstant, kVariable, kFeld };

  Kind kind = Kind::kVariable;
  double c = 0.9;
  double tau = 1.0;  // Feld only

  static ParameterRule constant(double c);
  static ParameterRule variable(double c);
  static ParameterRule feld(double c, double tau);

  /// c in (0, 1); tau > 0 for Feld. Throws kInvalidInput.
  void validate() const;
  std::string describe() const;
};

/// constant: c/J(u0); variable: c/J(u); Feld: c tau/(1 + tau J(u)).
/// Throws kNullSpaceInput when the J value it needs is not positive.
double make_alpha(const ParameterRule& rule, double J_u0, double J_u);

const char* to_string(ParameterRule::Kind k);

/// A (possibly nonlinear) map T on signals with value semantics: copies are
/// deep, including any solver warm-start state, so each thread should own its
/// copy.
class OperatorHandle {
 public:
  enum class Kind { kProx, kNet, kLinear, kComplement, kFunction };

  class Impl;

  /// prox_alpha^J with a fixed alpha.
  static OperatorHandle prox(Functional J, double alpha, ProxConfig cfg = {});
  /// prox_{alpha(u)}^J with alpha from a rule. The constant rule takes J(u0)
  /// from the first signal the operator is applied to (see reset()).
  static OperatorHandle prox(Functional J, ParameterRule rule, ProxConfig cfg = {});
  static OperatorHandle net(FeedForwardNet net);
  static OperatorHandle linear(DenseMatrix a);
  /// u -> u - T(u).
  static OperatorHandle complement(OperatorHandle inner);
  static OperatorHandle function(std::function<Signal(const Signal&)> f,
                                 std::string name);

  OperatorHandle(const OperatorHandle& other);
  OperatorHandle& operator=(const OperatorHandle& other);
  OperatorHandle(OperatorHandle&&) noexcept;
  OperatorHandle& operator=(OperatorHandle&&) noexcept;
  ~OperatorHandle();

  Kind kind() const;
  std::string describe() const;
  Signal apply(const Signal& u);
  Signal operator()(const Signal& u) { return apply(u); }

  /// Drops warm-start state and the constant-rule anchor.
  void reset();

  /// The functional of a prox operator (or of the prox inside a complement);
  /// nullptr otherwise.
  const Functional* functional() const;
  /// The net of a net operator; nullptr otherwise.
  const FeedForwardNet* net() const;

 private:
  explicit OperatorHandle(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

const char* to_string(OperatorHandle::Kind k);

}  // namespace proxeig
