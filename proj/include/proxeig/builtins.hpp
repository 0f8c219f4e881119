#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "proxeig/graph.hpp"
#include "proxeig/signal.hpp"

namespace proxeig {

/// size x size image: value 1 on the annulus 0.12 size <= r <= 0.3 size
/// around the image center, 0 elsewhere, plus N(0, noise_std^2) noise.
Signal noisy_disk(std::size_t size, double noise_std, std::uint64_t seed);

/// Unit impulses at a uniform k x k subgrid of pixel positions of a
/// rows x cols image (duplicates removed for small images). cols = 1 gives
/// flat signals.
std::vector<Signal> pixel_basis(std::size_t rows, std::size_t cols, std::size_t k);

/// i.i.d. standard normal entries.
Signal random_signal(Shape shape, std::uint64_t seed);

/// Eigenvector of the second-smallest eigenvalue of the weighted graph
/// Laplacian (dense solve; meant for graphs of a few thousand vertices at
/// most). Sign fixed so that the first nonzero entry is positive.
Signal fiedler_vector(const WeightedGraph& g);

}  // namespace proxeig
