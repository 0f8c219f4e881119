#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace proxeig {

/// Either a flat vector of length n or a rows x cols image stored row-major.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 1;
  bool grid = false;

  static Shape flat(std::size_t n) { return {n, 1, false}; }
  static Shape image(std::size_t rows, std::size_t cols) {
    return {rows, cols, true};
  }

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

/// The universal real vector u. Entries are finite after every public
/// operation; constructors reject NaN/Inf.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::vector<double> data);
  Signal(std::vector<double> data, Shape shape);

  static Signal zeros(Shape shape);
  static Signal constant(Shape shape, double value);

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  const Shape& shape() const { return shape_; }

  std::span<const double> values() const { return data_; }
  std::span<double> values_mut() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t row, std::size_t col) const {
    return data_[row * shape_.cols + col];
  }

  /// Same shape, new contents; throws if the length differs.
  Signal with_data(std::vector<double> data) const;

  /// Throws kInvalidInput if any entry is NaN or infinite.
  void check_finite() const;

 private:
  std::vector<double> data_;
  Shape shape_;
};

// Vector algebra on signals. Lengths must agree; shapes follow the left
// operand.
double dot(const Signal& a, const Signal& b);
double norm(const Signal& a);
double sum(const Signal& a);
double mean(const Signal& a);
double max_abs(const Signal& a);
Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
Signal operator*(double c, const Signal& a);
Signal add_constant(const Signal& a, double c);
/// u / ||u||; throws kInvalidInput on a zero vector.
Signal normalized(const Signal& u);
double distance(const Signal& a, const Signal& b);

}  // namespace proxeig
