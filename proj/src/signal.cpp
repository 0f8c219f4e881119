#include "proxeig/signal.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "proxeig/error.hpp"
#include "proxeig/kernels.hpp"

namespace proxeig {

namespace {

void require_same_length(const Signal& a, const Signal& b, const char* op) {
  require(a.size() == b.size(), ErrorKind::kInvalidInput,
          std::string(op) + ": length mismatch (" + std::to_string(a.size()) +
              " vs " + std::to_string(b.size()) + ")");
}

}  // namespace

Signal::Signal(std::vector<double> data)
    : data_(std::move(data)), shape_(Shape::flat(data_.size())) {
  check_finite();
}

Signal::Signal(std::vector<double> data, Shape shape)
    : data_(std::move(data)), shape_(shape) {
  require(shape_.size() == data_.size(), ErrorKind::kInvalidInput,
          "signal shape does not match data length");
  check_finite();
}

Signal Signal::zeros(Shape shape) { return constant(shape, 0.0); }

Signal Signal::constant(Shape shape, double value) {
  return Signal(std::vector<double>(shape.size(), value), shape);
}

Signal Signal::with_data(std::vector<double> data) const {
  return Signal(std::move(data), shape_);
}

void Signal::check_finite() const {
  for (double x : data_) {
    require(std::isfinite(x), ErrorKind::kInvalidInput,
            "signal contains a non-finite entry");
  }
}

double dot(const Signal& a, const Signal& b) {
  require_same_length(a, b, "dot");
  return kernels::dot(a.values(), b.values());
}

double norm(const Signal& a) {
  // Scaled to avoid overflow for large entries.
  const double m = kernels::max_abs(a.values());
  if (m == 0.0) return 0.0;
  if (m > 1e150 || m < 1e-150) {
    double s = 0.0;
    for (double x : a.values()) s += (x / m) * (x / m);
    return m * std::sqrt(s);
  }
  return std::sqrt(kernels::dot(a.values(), a.values()));
}

double sum(const Signal& a) { return kernels::sum(a.values()); }

double mean(const Signal& a) {
  require(!a.empty(), ErrorKind::kInvalidInput, "mean of an empty signal");
  return sum(a) / static_cast<double>(a.size());
}

double max_abs(const Signal& a) { return kernels::max_abs(a.values()); }

Signal operator+(const Signal& a, const Signal& b) {
  require_same_length(a, b, "add");
  std::vector<double> out(a.data());
  kernels::axpby(1.0, b.values(), 1.0, out);
  return a.with_data(std::move(out));
}

Signal operator-(const Signal& a, const Signal& b) {
  require_same_length(a, b, "subtract");
  std::vector<double> out(a.data());
  kernels::axpby(-1.0, b.values(), 1.0, out);
  return a.with_data(std::move(out));
}

Signal operator*(double c, const Signal& a) {
  std::vector<double> out(a.size());
  kernels::axpby(c, a.values(), 0.0, out);
  return a.with_data(std::move(out));
}

Signal add_constant(const Signal& a, double c) {
  std::vector<double> out(a.data());
  for (double& x : out) x += c;
  return a.with_data(std::move(out));
}

Signal normalized(const Signal& u) {
  const double n = norm(u);
  require(n > 0.0, ErrorKind::kInvalidInput, "cannot normalize a zero signal");
  return (1.0 / n) * u;
}

double distance(const Signal& a, const Signal& b) { return norm(a - b); }

}  // namespace proxeig
