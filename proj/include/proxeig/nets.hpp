#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "proxeig/linear_op.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

enum class Activation { kRelu, kNone };

struct Layer {
  enum class Type { kDense, kConv };

  Type type = Type::kDense;
  std::size_t rows = 0;  // dense
  std::size_t cols = 0;  // dense
  /// Conv kernel stack (out_ch, in_ch, kh, kw); stride 1, zero padding that
  /// keeps the spatial size. kh and kw must be odd.
  std::array<std::size_t, 4> shape{};
  std::vector<double> weights;  // row-major
  std::optional<std::vector<double>> bias;  // rows (dense) or out_ch (conv)
  Activation activation = Activation::kRelu;

  static Layer dense(DenseMatrix a, std::optional<std::vector<double>> bias,
                     Activation act);
  static Layer conv(std::array<std::size_t, 4> shape, std::vector<double> weights,
                    std::optional<std::vector<double>> bias, Activation act);
};

/// T(u) = s(A_n ... s(A_1 u + b_1) ... + b_n). Immutable after construction.
///
/// Conv layers act on images whose spatial size is taken from the grid shape
/// of the input signal.
class FeedForwardNet {
 public:
  explicit FeedForwardNet(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t n_layers() const { return layers_.size(); }
  bool bias_free() const;
  bool all_relu() const;

  Signal forward(const Signal& u) const;

  /// Pre-activation of the last layer (the input of its activation).
  std::vector<double> final_preactivation(const Signal& u) const;

  /// Product of per-layer operator-norm bounds (spectral norm for dense
  /// layers, a Young-inequality bound for conv layers).
  double lipschitz_bound() const;

 private:
  struct Geometry {
    std::size_t channels;
    std::size_t rows;
    std::size_t cols;
  };
  std::vector<double> apply_affine(const Layer& layer, std::span<const double> x,
                                   Geometry& geo) const;
  std::vector<double> run(const Signal& u, bool final_activation) const;

  std::vector<Layer> layers_;
};

/// The two-pixel example A = diag(-1, 1), b = (1, -1), ReLU.
FeedForwardNet toy_two_pixel_net();

struct RandomNetOptions {
  double mean = 0.0;
  /// Standard deviation; 0 selects 1/sqrt(fan_in).
  double std = 0.0;
  bool bias = false;
  bool relu_last = true;
};

/// Dense layers of the given widths (widths[0] = input size), Gaussian
/// weights from a seeded generator.
FeedForwardNet random_dense_net(const std::vector<std::size_t>& widths,
                                const RandomNetOptions& opts, std::uint64_t seed);

/// Conv layers with the given channel counts (channels[0] = input channels)
/// and square k x k kernels.
FeedForwardNet random_conv_net(const std::vector<std::size_t>& channels,
                               std::size_t k, const RandomNetOptions& opts,
                               std::uint64_t seed);

/// {u : A u + b <= 0} written as the cone {u0 + w : -A w >= 0}.
struct KernelCone {
  Signal tip;                // minimum-norm least-squares solution of A u0 = -b
  DenseMatrix constraint;    // -A
  std::vector<double> bias;  // b
  double residual = 0.0;     // ||A u0 + b||
  bool range_condition = true;

  /// Uses the cone form when the range condition holds and the direct
  /// inequality A u + b <= 0 otherwise.
  bool contains(const Signal& u) const;
};

KernelCone kernel_cone_single(const DenseMatrix& a, const std::vector<double>& b);

/// Kernel membership of a ReLU net via its final pre-activation; agrees with
/// forward(u) = 0. kUnsupported when some activation is not ReLU.
bool kernel_member_multilayer(const FeedForwardNet& net, const Signal& u);

/// Tolerance of membership tests: 1e-12 (1 + ||u||) per coordinate.
double kernel_tolerance(const Signal& u);

struct ConeReport {
  /// False when the range condition fails: the kernel is then a polyhedron
  /// that need not be a cone with apex at the tip, and nothing is sampled.
  bool applicable = true;
  std::size_t samples = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
};

/// Samples members u of the cone and checks u + a (u - tip) for
/// a in {0.5, 1, 10}.
ConeReport cone_property_test(const KernelCone& cone, std::size_t samples,
                              std::uint64_t seed);

enum class ToySet { kS1, kS2, kS3, kS4, kNone };

struct ToyEigenClass {
  ToySet set = ToySet::kNone;
  double alpha = 0.0;   // parameter of the set (unused for S4)
  double lambda = 0.0;  // predicted eigenvalue
};

/// Classifies u against the closed-form eigen-sets of the two-pixel net:
///   S1 = {(a, 0) : 0 < a < 1},                 lambda = (1 - a)/a
///   S2 = {(1/(1+a), 1/(1-a)) : 0 < a < 1},      lambda = a
///   S3 = {(a, 0) : a < 0},                      lambda = (1 - a)/a
///   S4 = {u1 >= 1, u2 <= 1},                    lambda = 0
ToyEigenClass toy_eigensets(const Signal& u, double tol = 1e-9);

const char* to_string(ToySet s);

}  // namespace proxeig
