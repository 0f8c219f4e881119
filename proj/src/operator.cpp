#include "proxeig/operator.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "proxeig/error.hpp"
#include "proxeig/kernels.hpp"

namespace proxeig {

ParameterRule ParameterRule::constant(double c) { return {Kind::kConstant, c, 1.0}; }
ParameterRule ParameterRule::variable(double c) { return {Kind::kVariable, c, 1.0}; }
ParameterRule ParameterRule::feld(double c, double tau) { return {Kind::kFeld, c, tau}; }

void ParameterRule::validate() const {
  require(c > 0.0 && c < 1.0, ErrorKind::kInvalidInput, "parameter rule: c must lie in (0, 1)");
  if (kind == Kind::kFeld)
    require(tau > 0.0 && std::isfinite(tau), ErrorKind::kInvalidInput,
            "parameter rule: tau must be positive");
}

std::string ParameterRule::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(c=" << c;
  if (kind == Kind::kFeld) os << ", tau=" << tau;
  os << ")";
  return os.str();
}

const char* to_string(ParameterRule::Kind k) {
  switch (k) {
    case ParameterRule::Kind::kConstant: return "constant";
    case ParameterRule::Kind::kVariable: return "variable";
    case ParameterRule::Kind::kFeld: return "feld";
  }
  return "?";
}

double make_alpha(const ParameterRule& rule, double J_u0, double J_u) {
  rule.validate();
  switch (rule.kind) {
    case ParameterRule::Kind::kConstant:
      require(J_u0 > 0.0, ErrorKind::kNullSpaceInput, "make_alpha: J(u0) <= 0");
      return rule.c / J_u0;
    case ParameterRule::Kind::kVariable:
      require(J_u > 0.0, ErrorKind::kNullSpaceInput, "make_alpha: J(u) <= 0");
      return rule.c / J_u;
    case ParameterRule::Kind::kFeld:
      require(J_u > 0.0, ErrorKind::kNullSpaceInput, "make_alpha: J(u) <= 0");
      return rule.c * rule.tau / (1.0 + rule.tau * J_u);
  }
  return 0.0;
}

class OperatorHandle::Impl {
 public:
  virtual ~Impl() = default;
  virtual Kind kind() const = 0;
  virtual std::string describe() const = 0;
  virtual Signal apply(const Signal& u) = 0;
  virtual std::unique_ptr<Impl> clone() const = 0;
  virtual void reset() {}
  virtual const Functional* functional() const { return nullptr; }
  virtual const FeedForwardNet* net() const { return nullptr; }
};

namespace {

using Impl = OperatorHandle::Impl;
using Kind = OperatorHandle::Kind;

class ProxImpl final : public Impl {
 public:
  ProxImpl(Functional J, std::optional<double> alpha, std::optional<ParameterRule> rule,
           ProxConfig cfg)
      : solver_(std::move(J), cfg), alpha_(alpha), rule_(rule) {
    if (alpha_)
      require(*alpha_ > 0.0, ErrorKind::kInvalidInput, "prox operator: alpha must be positive");
    if (rule_) rule_->validate();
  }

  Kind kind() const override { return Kind::kProx; }
  std::string describe() const override {
    std::ostringstream os;
    os << "prox[" << solver_.functional().describe() << ", ";
    if (alpha_) os << "alpha=" << *alpha_; else os << rule_->describe();
    os << "]";
    return os.str();
  }
  Signal apply(const Signal& u) override {
    double alpha;
    if (alpha_) {
      alpha = *alpha_;
    } else {
      const Functional& J = solver_.functional();
      if (!anchor_) anchor_ = J.evaluate(u);
      alpha = make_alpha(*rule_, *anchor_, J.evaluate(u));
    }
    return solver_.prox(u, alpha).v;
  }
  std::unique_ptr<Impl> clone() const override { return std::make_unique<ProxImpl>(*this); }
  void reset() override {
    solver_.reset_warm_start();
    anchor_.reset();
  }
  const Functional* functional() const override { return &solver_.functional(); }

 private:
  ProxSolver solver_;
  std::optional<double> alpha_;
  std::optional<ParameterRule> rule_;
  std::optional<double> anchor_;
};

class NetImpl final : public Impl {
 public:
  explicit NetImpl(std::shared_ptr<const FeedForwardNet> net) : net_(std::move(net)) {}
  Kind kind() const override { return Kind::kNet; }
  std::string describe() const override {
    return "net[" + std::to_string(net_->n_layers()) + " layers]";
  }
  Signal apply(const Signal& u) override { return net_->forward(u); }
  std::unique_ptr<Impl> clone() const override { return std::make_unique<NetImpl>(*this); }
  const FeedForwardNet* net() const override { return net_.get(); }

 private:
  std::shared_ptr<const FeedForwardNet> net_;
};

class LinearImpl final : public Impl {
 public:
  explicit LinearImpl(std::shared_ptr<const DenseMatrix> a) : a_(std::move(a)) {}
  Kind kind() const override { return Kind::kLinear; }
  std::string describe() const override {
    return "linear[" + std::to_string(a_->rows) + "x" + std::to_string(a_->cols) + "]";
  }
  Signal apply(const Signal& u) override {
    require(u.size() == a_->cols, ErrorKind::kInvalidInput, "linear operator: size mismatch");
    std::vector<double> out(a_->rows);
    kernels::dense_matvec(a_->data, a_->rows, a_->cols, u.values(), out);
    if (out.size() == u.size()) return u.with_data(std::move(out));
    return Signal(std::move(out));
  }
  std::unique_ptr<Impl> clone() const override { return std::make_unique<LinearImpl>(*this); }

 private:
  std::shared_ptr<const DenseMatrix> a_;
};

class ComplementImpl final : public Impl {
 public:
  explicit ComplementImpl(std::unique_ptr<Impl> inner) : inner_(std::move(inner)) {}
  ComplementImpl(const ComplementImpl& o) : inner_(o.inner_->clone()) {}
  Kind kind() const override { return Kind::kComplement; }
  std::string describe() const override { return "complement[" + inner_->describe() + "]"; }
  Signal apply(const Signal& u) override {
    const Signal t = inner_->apply(u);
    require(t.size() == u.size(), ErrorKind::kInvalidInput,
            "complement needs an operator with equal input and output sizes");
    return u - t;
  }
  std::unique_ptr<Impl> clone() const override { return std::make_unique<ComplementImpl>(*this); }
  void reset() override { inner_->reset(); }
  const Functional* functional() const override { return inner_->functional(); }
  const FeedForwardNet* net() const override { return inner_->net(); }

 private:
  std::unique_ptr<Impl> inner_;
};

class FunctionImpl final : public Impl {
 public:
  FunctionImpl(std::function<Signal(const Signal&)> f, std::string name)
      : f_(std::move(f)), name_(std::move(name)) {}
  Kind kind() const override { return Kind::kFunction; }
  std::string describe() const override { return name_; }
  Signal apply(const Signal& u) override { return f_(u); }
  std::unique_ptr<Impl> clone() const override { return std::make_unique<FunctionImpl>(*this); }

 private:
  std::function<Signal(const Signal&)> f_;
  std::string name_;
};

}  // namespace

OperatorHandle::OperatorHandle(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
OperatorHandle::OperatorHandle(const OperatorHandle& other) : impl_(other.impl_->clone()) {}
OperatorHandle& OperatorHandle::operator=(const OperatorHandle& other) {
  if (this != &other) impl_ = other.impl_->clone();
  return *this;
}
OperatorHandle::OperatorHandle(OperatorHandle&&) noexcept = default;
OperatorHandle& OperatorHandle::operator=(OperatorHandle&&) noexcept = default;
OperatorHandle::~OperatorHandle() = default;

OperatorHandle OperatorHandle::prox(Functional J, double alpha, ProxConfig cfg) {
  return OperatorHandle(std::make_unique<ProxImpl>(std::move(J), alpha, std::nullopt, cfg));
}
OperatorHandle OperatorHandle::prox(Functional J, ParameterRule rule, ProxConfig cfg) {
  return OperatorHandle(std::make_unique<ProxImpl>(std::move(J), std::nullopt, rule, cfg));
}
OperatorHandle OperatorHandle::net(FeedForwardNet net) {
  return OperatorHandle(
      std::make_unique<NetImpl>(std::make_shared<const FeedForwardNet>(std::move(net))));
}
OperatorHandle OperatorHandle::linear(DenseMatrix a) {
  require(a.data.size() == a.rows * a.cols && a.rows > 0, ErrorKind::kInvalidInput,
          "linear operator: malformed matrix");
  return OperatorHandle(
      std::make_unique<LinearImpl>(std::make_shared<const DenseMatrix>(std::move(a))));
}
OperatorHandle OperatorHandle::complement(OperatorHandle inner) {
  return OperatorHandle(std::make_unique<ComplementImpl>(std::move(inner.impl_)));
}
OperatorHandle OperatorHandle::function(std::function<Signal(const Signal&)> f,
                                        std::string name) {
  return OperatorHandle(std::make_unique<FunctionImpl>(std::move(f), std::move(name)));
}

OperatorHandle::Kind OperatorHandle::kind() const { return impl_->kind(); }
std::string OperatorHandle::describe() const { return impl_->describe(); }
Signal OperatorHandle::apply(const Signal& u) { return impl_->apply(u); }
void OperatorHandle::reset() { impl_->reset(); }
const Functional* OperatorHandle::functional() const { return impl_->functional(); }
const FeedForwardNet* OperatorHandle::net() const { return impl_->net(); }

const char* to_string(OperatorHandle::Kind k) {
  switch (k) {
    case Kind::kProx: return "prox";
    case Kind::kNet: return "net";
    case Kind::kLinear: return "linear";
    case Kind::kComplement: return "complement";
    case Kind::kFunction: return "function";
  }
  return "?";
}

}  // namespace proxeig
