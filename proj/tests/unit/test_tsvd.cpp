#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "svdrec/rng.hpp"
#include "svdrec/tsvd.hpp"

using namespace svdrec;
namespace oracle = svdrec::testing;

namespace {

// Strong parameters used when a test pins tight accuracy; the API defaults
// trade accuracy for speed on the big recommendation graphs.
TsvdParams strong_params(std::int64_t k, std::uint64_t seed = 0) {
  return {.k = k, .oversampling = 32, .power_iters = 20, .seed = seed};
}

SparseMatrix sparse_identity(std::int64_t n) {
  std::vector<std::int64_t> idx(n);
  std::vector<double> ones(n, 1.0);
  for (std::int64_t i = 0; i < n; ++i) idx[i] = i;
  return SparseMatrix::from_triplets(n, n, idx, idx, ones);
}

// Builds a matrix with exactly the given singular values from random
// orthonormal factors, returned in sparse form.
SparseMatrix with_spectrum(std::int64_t rows, std::int64_t cols,
                           const std::vector<double>& sigma, Rng& rng) {
  const auto r = static_cast<std::int64_t>(sigma.size());
  DenseMatrix gu(rows, r), gv(cols, r);
  for (double& v : gu.data) v = rng.gaussian();
  for (double& v : gv.data) v = rng.gaussian();
  const DenseMatrix qu = qr_thin(gu).q;
  const DenseMatrix qv = qr_thin(gv).q;
  DenseMatrix qus = qu;
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < r; ++j) qus(i, j) *= sigma[j];
  const DenseMatrix dense = matmul_nt(qus, qv);
  std::vector<std::int64_t> ri, ci;
  std::vector<double> vals;
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) {
      ri.push_back(i);
      ci.push_back(j);
      vals.push_back(dense(i, j));
    }
  return SparseMatrix::from_triplets(rows, cols, ri, ci, vals);
}

}  // namespace

TEST_CASE("identity matrix has unit singular values") {
  const TsvdResult f = truncated_svd(sparse_identity(100), strong_params(5));
  REQUIRE(f.s.size() == 5);
  for (double s : f.s) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.u.rows == 100);
  CHECK(f.u.cols == 5);
  CHECK(oracle::orthonormality_error(f.u) < 1e-10);
  CHECK(oracle::orthonormality_error(f.v) < 1e-10);
}

TEST_CASE("recovers a planted rank-3 spectrum") {
  Rng rng(31);
  const SparseMatrix m = with_spectrum(80, 60, {5.0, 2.0, 1.0}, rng);
  const TsvdResult f = truncated_svd(m, strong_params(3, 7));
  REQUIRE(f.s.size() == 3);
  CHECK(std::abs(f.s[0] - 5.0) < 1e-8);
  CHECK(std::abs(f.s[1] - 2.0) < 1e-8);
  CHECK(std::abs(f.s[2] - 1.0) < 1e-8);

  // Rank-3 input, rank-3 factorization: the residual vanishes.
  DenseMatrix us = f.u;
  for (std::int64_t i = 0; i < us.rows; ++i)
    for (std::int64_t j = 0; j < 3; ++j) us(i, j) *= f.s[j];
  CHECK(oracle::max_abs_diff(matmul_nt(us, f.v), to_dense(m)) < 1e-8);
}

TEST_CASE("matches the dense oracle per component on a 300x200 sparse matrix") {
  Rng rng(32);
  const SparseMatrix m = oracle::random_sparse(300, 200, 0.1, rng);
  const std::int64_t k = 16;
  const TsvdResult f = truncated_svd(m, strong_params(k, 3));
  const oracle::SvdOracle ref = oracle::svd_oracle(m);
  for (std::int64_t i = 0; i < k; ++i)
    CHECK(std::abs(f.s[i] - ref.s[i]) <= 1e-6 * ref.s[i]);
  CHECK(oracle::orthonormality_error(f.u) < 1e-8);
  CHECK(oracle::orthonormality_error(f.v) < 1e-8);
}

TEST_CASE("factors reproduce the action of the matrix") {
  // For k = rank, u s v^T is the matrix itself; check on a random low-rank one.
  Rng rng(33);
  const SparseMatrix m = with_spectrum(60, 45, {3.0, 2.5, 2.0, 1.5}, rng);
  const TsvdResult f = truncated_svd(m, strong_params(4, 11));
  DenseMatrix us = f.u;
  for (std::int64_t i = 0; i < us.rows; ++i)
    for (std::int64_t j = 0; j < 4; ++j) us(i, j) *= f.s[j];
  CHECK(oracle::max_abs_diff(matmul_nt(us, f.v), to_dense(m)) < 1e-8);
}

TEST_CASE("near-best low-rank approximation error") {
  Rng rng(34);
  const SparseMatrix m = oracle::random_sparse(120, 80, 0.2, rng);
  const std::int64_t k = 10;
  const TsvdResult f = truncated_svd(m, strong_params(k, 5));
  DenseMatrix us = f.u;
  for (std::int64_t i = 0; i < us.rows; ++i)
    for (std::int64_t j = 0; j < k; ++j) us(i, j) *= f.s[j];
  DenseMatrix resid = to_dense(m);
  const DenseMatrix approx = matmul_nt(us, f.v);
  for (std::size_t i = 0; i < resid.data.size(); ++i) resid.data[i] -= approx.data[i];

  // Optimal error from the full oracle spectrum.
  const oracle::SvdOracle ref = oracle::svd_oracle(m);
  double best_sq = 0.0;
  for (Eigen::Index i = k; i < ref.s.size(); ++i) best_sq += ref.s[i] * ref.s[i];
  CHECK(frobenius_norm(resid) <= 1.0001 * std::sqrt(best_sq));
}

TEST_CASE("deterministic for a fixed seed, different across seeds") {
  Rng rng(35);
  const SparseMatrix m = oracle::random_sparse(50, 40, 0.15, rng);
  TsvdParams p{.k = 6, .oversampling = 10, .power_iters = 7, .seed = 9};
  const TsvdResult a = truncated_svd(m, p);
  const TsvdResult b = truncated_svd(m, p);
  CHECK(a.s == b.s);
  CHECK(a.u.data == b.u.data);
  CHECK(a.v.data == b.v.data);

  p.seed = 10;
  const TsvdResult c = truncated_svd(m, p);
  CHECK(a.u.data != c.u.data);  // different sketch, different rounding
}

TEST_CASE("sign convention: largest-magnitude u entry is positive") {
  Rng rng(36);
  const SparseMatrix m = oracle::random_sparse(70, 50, 0.1, rng);
  const TsvdResult f = truncated_svd(m, strong_params(8, 2));
  for (std::int64_t j = 0; j < 8; ++j) {
    double best = 0.0;
    for (std::int64_t i = 0; i < f.u.rows; ++i)
      if (std::abs(f.u(i, j)) > std::abs(best)) best = f.u(i, j);
    CHECK(best > 0.0);
  }
}

TEST_CASE("singular values are non-increasing and non-negative") {
  Rng rng(37);
  const SparseMatrix m = oracle::random_sparse(90, 60, 0.12, rng);
  const TsvdResult f = truncated_svd(m, {.k = 12, .oversampling = 10, .power_iters = 7, .seed = 1});
  for (std::size_t i = 0; i < f.s.size(); ++i) {
    CHECK(f.s[i] >= 0.0);
    if (i > 0) CHECK(f.s[i] <= f.s[i - 1] + 1e-12);
  }
}

TEST_CASE("rejects invalid ranks") {
  const SparseMatrix m = sparse_identity(20);
  CHECK_THROWS(truncated_svd(m, {.k = 0, .oversampling = 10, .power_iters = 7, .seed = 0}));
  // Sketch wider than the matrix cannot be orthonormalized.
  CHECK_THROWS(truncated_svd(m, {.k = 15, .oversampling = 10, .power_iters = 7, .seed = 0}));
}
