#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "support/oracles.hpp"
#include "svdrec/embedding.hpp"
#include "svdrec/graph.hpp"
#include "svdrec/rng.hpp"
#include "svdrec/tsvd.hpp"

using namespace svdrec;
namespace oracle = svdrec::testing;

namespace {

constexpr TsvdParams kStrong{.k = 0, .oversampling = 32, .power_iters = 20, .seed = 0};

TsvdParams with_k(std::int64_t k, std::uint64_t seed) {
  TsvdParams p = kStrong;
  p.k = k;
  p.seed = seed;
  return p;
}

// Normalized adjacency of a random connected bipartite graph.
SparseMatrix toy_norm(std::int64_t users, std::int64_t items, Rng& rng) {
  return laplacian_normalize(symmetrize(oracle::random_bipartite_connected(users, items, 3.0, rng)));
}

}  // namespace

TEST_CASE("ssb rows are u scaled by the singular values, split at the user count") {
  Rng rng(41);
  const std::int64_t users = 18, items = 23, k = 6;
  const SparseMatrix nrm = toy_norm(users, items, rng);
  const TsvdResult f = truncated_svd(nrm, with_k(k, 3));
  const EmbeddingTable e = ssb_embeddings(f, users, items);

  CHECK(e.num_users == users);
  CHECK(e.num_items == items);
  CHECK(e.dim == k);
  CHECK(e.method_tag == EmbeddingMethod::ssb);
  CHECK(e.user_rows.rows == users);
  CHECK(e.item_rows.rows == items);
  for (std::int64_t x = 0; x < users + items; ++x) {
    const double* row = (x < users) ? e.user(x) : e.item(x - users);
    for (std::int64_t j = 0; j < k; ++j)
      CHECK(row[j] == f.u(x, j) * f.s[j]);  // same product, bit-identical
  }
}

TEST_CASE("embedding energy equals the energy of the kept spectrum") {
  // Columns of u are unit vectors, so sum of squared embeddings is sum s_j^2.
  Rng rng(42);
  const std::int64_t users = 25, items = 30, k = 5;
  const TsvdResult f = truncated_svd(toy_norm(users, items, rng), with_k(k, 1));
  const EmbeddingTable e = ssb_embeddings(f, users, items);
  double energy = 0.0;
  for (double v : e.user_rows.data) energy += v * v;
  for (double v : e.item_rows.data) energy += v * v;
  double want = 0.0;
  for (double s : f.s) want += s * s;
  CHECK(energy == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("single user-item pair splits one unit of spectral mass") {
  // The 2-node normalized graph is [[0,1],[1,0]], whose eigenvalues are +1
  // and -1: both singular values equal 1, so the top singular vector is any
  // unit vector. Only the combined mass is pinned, not the split.
  const SparseMatrix nrm =
      SparseMatrix::from_triplets(2, 2, {0, 1}, {1, 0}, {1.0, 1.0});
  const TsvdResult f = truncated_svd(nrm, {.k = 1, .oversampling = 1, .power_iters = 7, .seed = 0});
  const EmbeddingTable e = ssb_embeddings(f, 1, 1);
  CHECK(f.s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.user(0)[0] * e.user(0)[0] + e.item(0)[0] * e.item(0)[0] ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("embedding gram matches the truncated square of the adjacency") {
  // For the symmetric normalized matrix A = U diag(l) U^T the rows e_x are
  // u_x scaled by s, so E E^T = U_k diag(s^2) U_k^T: the best rank-k
  // approximation of A^2. The oracle builds that truncation by
  // eigendecomposition.
  Rng rng(43);
  const std::int64_t users = 12, items = 15;
  const SparseMatrix nrm = toy_norm(users, items, rng);
  const std::int64_t n = nrm.rows;

  const Eigen::MatrixXd dense = oracle::to_eigen(nrm);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  std::vector<std::int64_t> order(n);
  for (std::int64_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
  });

  // Pick the even k with the widest relative gap so the truncation is a well
  // separated, uniquely defined target.
  std::int64_t k = 0;
  double best_gap = 0.0;
  for (std::int64_t cand = 2; cand <= 8; cand += 2) {
    const double sk = std::abs(es.eigenvalues()[order[cand - 1]]);
    const double sk1 = std::abs(es.eigenvalues()[order[cand]]);
    const double gap = (sk - sk1) / sk;
    if (gap > best_gap) {
      best_gap = gap;
      k = cand;
    }
  }
  REQUIRE(best_gap > 5e-3);

  Eigen::MatrixXd truncated = Eigen::MatrixXd::Zero(n, n);
  for (std::int64_t j = 0; j < k; ++j) {
    const double lambda = es.eigenvalues()[order[j]];
    const Eigen::VectorXd v = es.eigenvectors().col(order[j]);
    truncated += lambda * lambda * v * v.transpose();
  }

  const TsvdResult f =
      truncated_svd(nrm, {.k = k, .oversampling = 12, .power_iters = 20, .seed = 7});
  const EmbeddingTable e = ssb_embeddings(f, users, items);
  Eigen::MatrixXd rows(n, k);
  for (std::int64_t x = 0; x < n; ++x) {
    const double* r = (x < users) ? e.user(x) : e.item(x - users);
    for (std::int64_t j = 0; j < k; ++j) rows(x, j) = r[j];
  }
  const Eigen::MatrixXd gram = rows * rows.transpose();
  CHECK((gram - truncated).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("tsa concatenates the two factorizations, first block bit-equal to ssb") {
  Rng rng(44);
  const std::int64_t users = 16, items = 21, k = 4;
  const SparseMatrix nrm = toy_norm(users, items, rng);
  const SparseMatrix nrm2 = matrix_power2(nrm);
  const TsvdResult f1 = truncated_svd(nrm, with_k(k, 10));
  const TsvdResult f2 = truncated_svd(nrm2, with_k(k, 11));
  const EmbeddingTable ssb = ssb_embeddings(f1, users, items);
  const EmbeddingTable tsa = tsa_embeddings(f1, f2, users, items);

  CHECK(tsa.dim == 2 * k);
  CHECK(tsa.method_tag == EmbeddingMethod::tsa);
  for (std::int64_t u = 0; u < users; ++u)
    for (std::int64_t j = 0; j < k; ++j) {
      CHECK(tsa.user(u)[j] == ssb.user(u)[j]);
      CHECK(tsa.user(u)[k + j] == f2.u(u, j) * f2.s[j]);
    }
  for (std::int64_t i = 0; i < items; ++i)
    for (std::int64_t j = 0; j < k; ++j) {
      CHECK(tsa.item(i)[j] == ssb.item(i)[j]);
      CHECK(tsa.item(i)[k + j] == f2.u(users + i, j) * f2.s[j]);
    }
}

TEST_CASE("row-count mismatches are rejected") {
  Rng rng(45);
  const SparseMatrix nrm = toy_norm(10, 12, rng);
  const TsvdParams small{.k = 3, .oversampling = 8, .power_iters = 7, .seed = 0};
  const TsvdResult f = truncated_svd(nrm, small);
  CHECK_THROWS(ssb_embeddings(f, 10, 13));  // 10 + 13 != 22 nodes
  TsvdParams small2 = small;
  small2.seed = 1;
  const TsvdResult g = truncated_svd(matrix_power2(nrm), small2);
  CHECK_NOTHROW(tsa_embeddings(f, g, 10, 12));
  TsvdParams bigger = small2;
  bigger.k = 4;
  const TsvdResult h = truncated_svd(matrix_power2(nrm), bigger);
  CHECK_THROWS(tsa_embeddings(f, h, 10, 12));  // ranks differ
}
