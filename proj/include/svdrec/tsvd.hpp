#pragma once

#include <cstdint>
#include <vector>

#include "svdrec/dense_matrix.hpp"
#include "svdrec/sparse_matrix.hpp"

namespace svdrec {

struct TsvdParams {
  std::int64_t k = 0;             // target rank
  std::int64_t oversampling = 10; // extra sketch columns
  std::int64_t power_iters = 7;   // subspace iteration rounds
  std::uint64_t seed = 0;
};

struct TsvdResult {
  DenseMatrix u;          // rows x k, orthonormal columns
  std::vector<double> s;  // k, non-increasing, non-negative
  DenseMatrix v;          // cols x k, orthonormal columns
};

// Rank-k factorization by randomized subspace iteration: a seeded Gaussian
// sketch is alternately multiplied by the matrix and its transpose, with a
// thin QR re-orthonormalization after every half-step, then the projected
// (k+oversampling)-row matrix is factored exactly and truncated.
//
// Deterministic for a fixed (matrix, params): the sketch comes from the
// xoshiro256++ stream and every later step is sequential. Each singular-vector
// pair is sign-flipped so the largest-magnitude entry of the u column is
// positive.
TsvdResult truncated_svd(const SparseMatrix& m, const TsvdParams& p);

}  // namespace svdrec
