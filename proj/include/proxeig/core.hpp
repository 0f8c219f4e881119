#pragma once

#include <vector>

#include "proxeig/signal.hpp"

namespace proxeig {

struct MeanSplit {
  double mean = 0.0;
  Signal centered;
};

/// u = mean * 1 + centered with <centered, 1> = 0.
MeanSplit mean_project(const Signal& u);

/// u minus its orthogonal projection onto span(basis). The basis must be
/// orthonormal to 1e-8; otherwise kInvalidInput.
Signal subspace_project(const Signal& u, const std::vector<Signal>& basis);

/// Modified Gram-Schmidt; drops vectors whose residual norm falls below
/// drop_tol times their original norm.
std::vector<Signal> orthonormalize(const std::vector<Signal>& vectors,
                                   double drop_tol = 1e-10);

}  // namespace proxeig
