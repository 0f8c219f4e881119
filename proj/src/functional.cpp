#include "proxeig/functional.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "proxeig/core.hpp"
#include "proxeig/error.hpp"
#include "proxeig/kernels.hpp"

namespace proxeig {

namespace {

double lp_norm(std::span<const double> e, double p) {
  if (e.empty()) return 0.0;
  if (p == 1.0) return kernels::sum_abs(e);
  if (p == 2.0) return std::sqrt(kernels::dot(e, e));
  const double m = kernels::max_abs(e);
  if (std::isinf(p) || m == 0.0) return m;
  double s = 0.0;
  for (double x : e) s += std::pow(std::abs(x) / m, p);
  return m * std::pow(s, 1.0 / p);
}

double conjugate_exponent(double p) {
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

void check_exponent(double p) {
  require(p >= 1.0 && !std::isnan(p), ErrorKind::kInvalidInput,
          "functional exponent p must lie in [1, inf]");
}

}  // namespace

Functional Functional::l1() {
  Functional f;
  f.kind_ = Kind::kL1;
  return f;
}

void Functional::init_composite(std::shared_ptr<const LinearOp> op, double p) {
  check_exponent(p);
  p_ = p;
  op_ = std::move(op);
  dim_ = op_->in_size();
  op_norm_ = op_->norm_estimate();
}

Functional Functional::aniso_tv(std::size_t rows, std::size_t cols) {
  Functional f;
  f.kind_ = Kind::kAnisoTV;
  f.init_composite(std::make_shared<const LinearOp>(LinearOp::grid_gradient(rows, cols)), 1.0);
  return f;
}

Functional Functional::graph_p(const WeightedGraph& graph, double p,
                               bool zero_on_boundary) {
  require(graph.n_edges() > 0, ErrorKind::kInvalidInput, "graph functional needs edges");
  Functional f;
  f.kind_ = Kind::kGraphP;
  f.init_composite(std::make_shared<const LinearOp>(LinearOp::graph_gradient(graph)), p);
  f.component_ = graph.components();
  f.n_components_ = graph.n_components();
  f.component_pinned_.assign(f.n_components_, 0);
  if (zero_on_boundary && !graph.boundary().empty()) {
    f.mask_.assign(graph.n_vertices(), 0);
    for (auto b : graph.boundary()) {
      f.mask_[b] = 1;
      f.component_pinned_[f.component_[b]] = 1;
    }
  }
  return f;
}

Functional Functional::dense_p(DenseMatrix matrix, double p) {
  Functional f;
  f.kind_ = Kind::kDenseP;
  const std::size_t rows = matrix.rows, cols = matrix.cols;
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = matrix(i, j);
  f.init_composite(std::make_shared<const LinearOp>(LinearOp::dense(std::move(matrix))), p);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
  std::vector<Signal> basis;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(cols); ++k) {
    const double s = k < sv.size() ? sv(k) : 0.0;
    if (s <= cutoff) {
      std::vector<double> v(cols);
      for (std::size_t i = 0; i < cols; ++i) v[i] = svd.matrixV()(static_cast<Eigen::Index>(i), k);
      basis.emplace_back(std::move(v));
    }
  }
  f.null_basis_ = std::make_shared<const std::vector<Signal>>(orthonormalize(basis));
  return f;
}

const LinearOp& Functional::op() const {
  require(op_ != nullptr, ErrorKind::kUnsupported, "functional has no linear operator");
  return *op_;
}

std::string Functional::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kL1: os << "l1"; break;
    case Kind::kAnisoTV: {
      const auto [r, c] = op_->grid_dims();
      os << "aniso_tv(" << r << "x" << c << ")";
      break;
    }
    case Kind::kGraphP:
      os << "graph_p(p=" << p_ << ", n=" << dim_ << (mask_.empty() ? "" : ", zero_on_boundary") << ")";
      break;
    case Kind::kDenseP: os << "dense_p(p=" << p_ << ")"; break;
  }
  return os.str();
}

void Functional::check_compatible(const Signal& u) const {
  if (kind_ == Kind::kL1) return;
  require(u.size() == dim_, ErrorKind::kInvalidInput,
          "signal length " + std::to_string(u.size()) + " does not match functional (" +
              describe() + ")");
  if (kind_ == Kind::kAnisoTV && u.shape().grid) {
    const auto [r, c] = op_->grid_dims();
    require(u.shape().rows == r && u.shape().cols == c, ErrorKind::kInvalidInput,
            "grid shape does not match the TV functional");
  }
}

double Functional::edge_norm(std::span<const double> e) const { return lp_norm(e, p_); }

double Functional::edge_dual_norm(std::span<const double> e) const {
  return lp_norm(e, conjugate_exponent(p_));
}

double Functional::evaluate(const Signal& u) const {
  check_compatible(u);
  if (kind_ == Kind::kL1) return kernels::sum_abs(u.values());
  return edge_norm(op_->apply(u.values()));
}

bool Functional::is_null(const Signal& u) const {
  const double nu = norm(u);
  if (nu == 0.0) return true;
  double scale;
  if (kind_ == Kind::kL1) {
    scale = std::sqrt(static_cast<double>(u.size()));
  } else {
    const double m = static_cast<double>(op_->out_size());
    scale = std::max(op_norm_, 1e-300) * std::pow(m, std::max(0.0, 1.0 / p_ - 0.5));
  }
  return evaluate(u) <= 1e-12 * scale * nu;
}

Signal Functional::null_space_project(const Signal& u) const {
  check_compatible(u);
  switch (kind_) {
    case Kind::kL1:
      return u;
    case Kind::kAnisoTV:
      return mean_project(u).centered;
    case Kind::kDenseP:
      return subspace_project(u, *null_basis_);
    case Kind::kGraphP: {
      std::vector<double> sums(n_components_, 0.0);
      std::vector<double> counts(n_components_, 0.0);
      for (std::size_t v = 0; v < u.size(); ++v) {
        sums[component_[v]] += u[v];
        counts[component_[v]] += 1.0;
      }
      std::vector<double> out(u.data());
      for (std::size_t v = 0; v < u.size(); ++v) {
        const std::size_t c = component_[v];
        if (component_pinned_[c]) {
          if (mask_[v]) out[v] = 0.0;
        } else {
          out[v] -= sums[c] / counts[c];
        }
      }
      return u.with_data(std::move(out));
    }
  }
  return u;
}

double dual_norm_lower_bound(const Functional& J, const Signal& u) {
  require(!J.is_null(u), ErrorKind::kNullSpaceInput,
          "dual_norm_lower_bound: J(u) = 0");
  const double n = norm(u);
  return n * n / J.evaluate(u);
}

double dual_norm_exact_l1(const Signal& u) { return max_abs(u); }

Subgradient subgradient_from_prox(const Functional& J, const Signal& u,
                                  const Signal& v, double alpha,
                                  double achieved_gap) {
  require(alpha > 0.0, ErrorKind::kInvalidInput, "subgradient_from_prox: alpha <= 0");
  J.check_compatible(u);
  require(u.size() == v.size(), ErrorKind::kInvalidInput,
          "subgradient_from_prox: length mismatch");
  return {(1.0 / alpha) * (u - v), alpha, v, achieved_gap};
}

}  // namespace proxeig
