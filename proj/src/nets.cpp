#include "proxeig/nets.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "proxeig/error.hpp"
#include "proxeig/kernels.hpp"

namespace proxeig {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const DenseMatrix& a) {
  MatrixXd m(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) m(i, j) = a(i, j);
  return m;
}

double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Layer Layer::dense(DenseMatrix a, std::optional<std::vector<double>> bias,
                   Activation act) {
  Layer l;
  l.type = Type::kDense;
  l.rows = a.rows;
  l.cols = a.cols;
  l.weights = std::move(a.data);
  l.bias = std::move(bias);
  l.activation = act;
  return l;
}

Layer Layer::conv(std::array<std::size_t, 4> shape, std::vector<double> weights,
                  std::optional<std::vector<double>> bias, Activation act) {
  Layer l;
  l.type = Type::kConv;
  l.shape = shape;
  l.weights = std::move(weights);
  l.bias = std::move(bias);
  l.activation = act;
  return l;
}

FeedForwardNet::FeedForwardNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
  require(!layers_.empty(), ErrorKind::kInvalidInput, "net has no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& l = layers_[k];
    const std::string where = "layer " + std::to_string(k) + ": ";
    for (double w : l.weights)
      require(std::isfinite(w), ErrorKind::kInvalidInput, where + "non-finite weight");
    if (l.bias)
      for (double b : *l.bias)
        require(std::isfinite(b), ErrorKind::kInvalidInput, where + "non-finite bias");
    if (l.type == Layer::Type::kDense) {
      require(l.rows > 0 && l.cols > 0 && l.weights.size() == l.rows * l.cols,
              ErrorKind::kInvalidInput, where + "weights do not match rows x cols");
      require(!l.bias || l.bias->size() == l.rows, ErrorKind::kInvalidInput,
              where + "bias length != rows");
    } else {
      const auto [oc, ic, kh, kw] = l.shape;
      require(oc > 0 && ic > 0 && kh % 2 == 1 && kw % 2 == 1, ErrorKind::kInvalidInput,
              where + "conv shape needs positive channels and odd kernel sizes");
      require(l.weights.size() == oc * ic * kh * kw, ErrorKind::kInvalidInput,
              where + "weights do not match conv shape");
      require(!l.bias || l.bias->size() == oc, ErrorKind::kInvalidInput,
              where + "bias length != out channels");
    }
    if (k == 0) continue;
    const Layer& prev = layers_[k - 1];
    if (l.type == Layer::Type::kDense && prev.type == Layer::Type::kDense) {
      require(l.cols == prev.rows, ErrorKind::kInvalidInput,
              where + "input size does not match previous layer");
    } else if (l.type == Layer::Type::kConv && prev.type == Layer::Type::kConv) {
      require(l.shape[1] == prev.shape[0], ErrorKind::kInvalidInput,
              where + "in channels do not match previous layer");
    } else if (l.type == Layer::Type::kConv) {
      fail(ErrorKind::kInvalidInput, where + "conv after dense layer is not supported");
    }
  }
}

bool FeedForwardNet::bias_free() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const Layer& l) {
    return !l.bias || std::all_of(l.bias->begin(), l.bias->end(),
                                  [](double b) { return b == 0.0; });
  });
}

bool FeedForwardNet::all_relu() const {
  return std::all_of(layers_.begin(), layers_.end(),
                     [](const Layer& l) { return l.activation == Activation::kRelu; });
}

std::vector<double> FeedForwardNet::apply_affine(const Layer& l,
                                                 std::span<const double> x,
                                                 Geometry& geo) const {
  if (l.type == Layer::Type::kDense) {
    require(x.size() == l.cols, ErrorKind::kInvalidInput,
            "net input size " + std::to_string(x.size()) + " != layer cols " +
                std::to_string(l.cols));
    std::vector<double> out(l.rows);
    kernels::dense_matvec(l.weights, l.rows, l.cols, x, out);
    if (l.bias)
      for (std::size_t i = 0; i < l.rows; ++i) out[i] += (*l.bias)[i];
    geo = {1, l.rows, 1};
    return out;
  }
  const auto [oc, ic, kh, kw] = l.shape;
  require(geo.channels == ic && x.size() == ic * geo.rows * geo.cols,
          ErrorKind::kInvalidInput, "conv layer input does not match its channel count");
  const std::size_t H = geo.rows, W = geo.cols, hw = H * W;
  const long ph = long(kh / 2), pw = long(kw / 2);
  std::vector<double> out(oc * hw, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t o = 0; o < oc; ++o) {
    double* dst = out.data() + o * hw;
    for (std::size_t c = 0; c < ic; ++c) {
      const double* src = x.data() + c * hw;
      const double* w = l.weights.data() + (o * ic + c) * kh * kw;
      for (std::size_t dy = 0; dy < kh; ++dy) {
        for (std::size_t dx = 0; dx < kw; ++dx) {
          const double wt = w[dy * kw + dx];
          if (wt == 0.0) continue;
          const long oy = long(dy) - ph, ox = long(dx) - pw;
          for (std::size_t y = 0; y < H; ++y) {
            const long sy = long(y) + oy;
            if (sy < 0 || sy >= long(H)) continue;
            for (std::size_t xx = 0; xx < W; ++xx) {
              const long sx = long(xx) + ox;
              if (sx < 0 || sx >= long(W)) continue;
              dst[y * W + xx] += wt * src[sy * long(W) + sx];
            }
          }
        }
      }
    }
    if (l.bias)
      for (std::size_t i = 0; i < hw; ++i) dst[i] += (*l.bias)[o];
  }
  geo.channels = oc;
  return out;
}

std::vector<double> FeedForwardNet::run(const Signal& u, bool final_activation) const {
  Geometry geo{1, u.shape().rows, u.shape().cols};
  if (layers_.front().type == Layer::Type::kConv) {
    const std::size_t ic = layers_.front().shape[1];
    require(u.shape().grid || ic > 1, ErrorKind::kInvalidInput,
            "conv net needs an image-shaped input");
    geo.channels = ic;
    if (ic > 1) {
      // Multi-channel input is stored as a (ic*rows) x cols image.
      require(u.shape().rows % ic == 0, ErrorKind::kInvalidInput,
              "input rows not divisible by input channels");
      geo.rows = u.shape().rows / ic;
    }
  }
  std::vector<double> x(u.data());
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    x = apply_affine(layers_[k], x, geo);
    const bool last = k + 1 == layers_.size();
    if (layers_[k].activation == Activation::kRelu && (!last || final_activation))
      kernels::relu_inplace(x);
  }
  return x;
}

Signal FeedForwardNet::forward(const Signal& u) const {
  std::vector<double> out = run(u, true);
  if (out.size() == u.size()) return Signal(std::move(out), u.shape());
  return Signal(std::move(out));
}

std::vector<double> FeedForwardNet::final_preactivation(const Signal& u) const {
  return run(u, false);
}

double FeedForwardNet::lipschitz_bound() const {
  double bound = 1.0;
  for (const Layer& l : layers_) {
    if (l.type == Layer::Type::kDense) {
      bound *= spectral_norm(to_eigen({l.rows, l.cols, l.weights}));
    } else {
      const auto [oc, ic, kh, kw] = l.shape;
      MatrixXd blocks(oc, ic);
      for (std::size_t o = 0; o < oc; ++o)
        for (std::size_t c = 0; c < ic; ++c) {
          double s = 0.0;
          for (std::size_t t = 0; t < kh * kw; ++t)
            s += std::abs(l.weights[(o * ic + c) * kh * kw + t]);
          blocks(o, c) = s;
        }
      bound *= spectral_norm(blocks);
    }
  }
  require(std::isfinite(bound), ErrorKind::kInvalidInput, "net Lipschitz bound is not finite");
  return bound;
}

FeedForwardNet toy_two_pixel_net() {
  DenseMatrix a{2, 2, {-1.0, 0.0, 0.0, 1.0}};
  return FeedForwardNet({Layer::dense(std::move(a), std::vector<double>{1.0, -1.0},
                                      Activation::kRelu)});
}

FeedForwardNet random_dense_net(const std::vector<std::size_t>& widths,
                                const RandomNetOptions& opts, std::uint64_t seed) {
  require(widths.size() >= 2, ErrorKind::kInvalidInput, "random_dense_net needs >= 2 widths");
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  for (std::size_t k = 1; k < widths.size(); ++k) {
    const std::size_t rows = widths[k], cols = widths[k - 1];
    const double sd = opts.std > 0.0 ? opts.std : 1.0 / std::sqrt(double(cols));
    std::normal_distribution<double> dist(opts.mean, sd);
    DenseMatrix a{rows, cols, std::vector<double>(rows * cols)};
    for (double& w : a.data) w = dist(rng);
    std::optional<std::vector<double>> bias;
    if (opts.bias) {
      bias.emplace(rows);
      for (double& b : *bias) b = dist(rng);
    }
    const bool last = k + 1 == widths.size();
    layers.push_back(Layer::dense(std::move(a), std::move(bias),
                                  (!last || opts.relu_last) ? Activation::kRelu
                                                            : Activation::kNone));
  }
  return FeedForwardNet(std::move(layers));
}

FeedForwardNet random_conv_net(const std::vector<std::size_t>& channels, std::size_t k,
                               const RandomNetOptions& opts, std::uint64_t seed) {
  require(channels.size() >= 2, ErrorKind::kInvalidInput, "random_conv_net needs >= 2 channel counts");
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  for (std::size_t l = 1; l < channels.size(); ++l) {
    const std::size_t oc = channels[l], ic = channels[l - 1];
    const double sd = opts.std > 0.0 ? opts.std : 1.0 / std::sqrt(double(ic * k * k));
    std::normal_distribution<double> dist(opts.mean, sd);
    std::vector<double> w(oc * ic * k * k);
    for (double& x : w) x = dist(rng);
    std::optional<std::vector<double>> bias;
    if (opts.bias) {
      bias.emplace(oc);
      for (double& b : *bias) b = dist(rng);
    }
    const bool last = l + 1 == channels.size();
    layers.push_back(Layer::conv({oc, ic, k, k}, std::move(w), std::move(bias),
                                 (!last || opts.relu_last) ? Activation::kRelu
                                                           : Activation::kNone));
  }
  return FeedForwardNet(std::move(layers));
}

double kernel_tolerance(const Signal& u) {
  return 1e-12 * (1.0 + norm(u));
}

KernelCone kernel_cone_single(const DenseMatrix& a, const std::vector<double>& b) {
  require(a.rows == b.size(), ErrorKind::kInvalidInput, "kernel_cone_single: bias length != rows");
  const MatrixXd A = to_eigen(a);
  const VectorXd rhs = -Eigen::Map<const VectorXd>(b.data(), Eigen::Index(b.size()));
  const VectorXd tip = A.completeOrthogonalDecomposition().solve(rhs);

  KernelCone cone;
  cone.tip = Signal(std::vector<double>(tip.data(), tip.data() + tip.size()));
  cone.constraint = {a.rows, a.cols, a.data};
  for (double& x : cone.constraint.data) x = -x;
  cone.bias = b;
  cone.residual = (A * tip - rhs).norm();
  cone.range_condition = cone.residual <= 1e-8 * std::max(rhs.norm(), 1e-300) || rhs.norm() == 0.0;
  return cone;
}

bool KernelCone::contains(const Signal& u) const {
  require(u.size() == constraint.cols, ErrorKind::kInvalidInput,
          "KernelCone::contains: dimension mismatch");
  const double tol = kernel_tolerance(u);
  std::vector<double> z(constraint.rows);
  if (range_condition) {
    // -A (u - tip) >= 0
    const Signal w = u - tip;
    kernels::dense_matvec(constraint.data, constraint.rows, constraint.cols, w.values(), z);
    return std::all_of(z.begin(), z.end(), [&](double x) { return x >= -tol; });
  }
  // A u + b <= 0
  kernels::dense_matvec(constraint.data, constraint.rows, constraint.cols, u.values(), z);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (-z[i] + bias[i] > tol) return false;
  return true;
}

bool kernel_member_multilayer(const FeedForwardNet& net, const Signal& u) {
  require(net.all_relu(), ErrorKind::kUnsupported,
          "kernel membership needs ReLU activations in every layer");
  const std::vector<double> z = net.final_preactivation(u);
  const double tol = kernel_tolerance(u);
  return std::all_of(z.begin(), z.end(), [&](double x) { return x <= tol; });
}

ConeReport cone_property_test(const KernelCone& cone, std::size_t samples,
                              std::uint64_t seed) {
  const MatrixXd negA = to_eigen(cone.constraint);
  const std::size_t n = cone.constraint.cols;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::optional<Eigen::FullPivLU<MatrixXd>> lu;
  if (negA.rows() == negA.cols()) {
    Eigen::FullPivLU<MatrixXd> f(negA);
    if (f.isInvertible()) lu.emplace(std::move(f));
  }

  ConeReport report;
  if (!cone.range_condition) {
    report.applicable = false;
    return report;
  }
  const double scale = 1.0 + norm(cone.tip);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(samples, 1);
  while (report.samples < samples && attempts < max_attempts) {
    ++attempts;
    std::vector<double> x(n);
    if (lu) {
      // -A w = s with s >= 0 gives a member tip + w.
      VectorXd s(n);
      for (std::size_t i = 0; i < n; ++i) s(Eigen::Index(i)) = expo(rng);
      const VectorXd w = lu->solve(s);
      for (std::size_t i = 0; i < n; ++i) x[i] = cone.tip[i] + w(Eigen::Index(i));
    } else {
      for (std::size_t i = 0; i < n; ++i) x[i] = cone.tip[i] + scale * gauss(rng);
    }
    const Signal u(std::move(x));
    if (!cone.contains(u)) continue;
    ++report.samples;
    for (double a : {0.5, 1.0, 10.0}) {
      ++report.checks;
      if (!cone.contains(u + a * (u - cone.tip))) ++report.violations;
    }
  }
  return report;
}

ToyEigenClass toy_eigensets(const Signal& u, double tol) {
  require(u.size() == 2, ErrorKind::kInvalidInput, "toy_eigensets: need a length-2 signal");
  const double u1 = u[0], u2 = u[1];
  ToyEigenClass c;
  if (u1 >= 1.0 - tol && u2 <= 1.0 + tol) {
    c.set = ToySet::kS4;
    return c;
  }
  if (std::abs(u2) <= tol) {
    if (u1 > 0.0 && u1 < 1.0) {
      c.set = ToySet::kS1;
    } else if (u1 < 0.0) {
      c.set = ToySet::kS3;
    } else {
      return c;
    }
    c.alpha = u1;
    c.lambda = (1.0 - u1) / u1;
    return c;
  }
  if (u2 > 1.0) {
    const double a = 1.0 - 1.0 / u2;
    if (a > 0.0 && a < 1.0 && std::abs(u1 - 1.0 / (1.0 + a)) <= tol * (1.0 + std::abs(u2))) {
      c.set = ToySet::kS2;
      c.alpha = a;
      c.lambda = a;
    }
  }
  return c;
}

const char* to_string(ToySet s) {
  switch (s) {
    case ToySet::kS1: return "S1";
    case ToySet::kS2: return "S2";
    case ToySet::kS3: return "S3";
    case ToySet::kS4: return "S4";
    case ToySet::kNone: return "none";
  }
  return "none";
}

}  // namespace proxeig
