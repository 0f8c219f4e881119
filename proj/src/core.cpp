#include "proxeig/core.hpp"

#include <cmath>

#include "proxeig/error.hpp"

namespace proxeig {

MeanSplit mean_project(const Signal& u) {
  require(!u.empty(), ErrorKind::kInvalidInput, "mean_project: empty signal");
  const double m = mean(u);
  Signal centered = add_constant(u, -m);
  // One correction pass keeps <centered, 1> at rounding level for large means.
  const double drift = mean(centered);
  if (drift != 0.0) centered = add_constant(centered, -drift);
  return {m + drift, std::move(centered)};
}

Signal subspace_project(const Signal& u, const std::vector<Signal>& basis) {
  for (std::size_t a = 0; a < basis.size(); ++a) {
    require(basis[a].size() == u.size(), ErrorKind::kInvalidInput,
            "subspace_project: basis vector length mismatch");
    for (std::size_t b = a; b < basis.size(); ++b) {
      const double expected = (a == b) ? 1.0 : 0.0;
      require(std::abs(dot(basis[a], basis[b]) - expected) <= 1e-8,
              ErrorKind::kInvalidInput, "subspace_project: basis not orthonormal");
    }
  }
  Signal r = u;
  // Two passes of modified Gram-Schmidt against the basis.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Signal& b : basis) r = r - dot(r, b) * b;
  }
  return r;
}

std::vector<Signal> orthonormalize(const std::vector<Signal>& vectors,
                                   double drop_tol) {
  std::vector<Signal> out;
  for (const Signal& v : vectors) {
    const double n0 = norm(v);
    if (n0 == 0.0) continue;
    Signal r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Signal& b : out) r = r - dot(r, b) * b;
    }
    const double nr = norm(r);
    if (nr <= drop_tol * n0) continue;
    out.push_back((1.0 / nr) * r);
  }
  return out;
}

}  // namespace proxeig
