#pragma once

#include <cstdint>

#include "svdrec/dense_matrix.hpp"
#include "svdrec/tsvd.hpp"

namespace svdrec {

enum class EmbeddingMethod : std::uint8_t { ssb = 0, tsa = 1 };

// Frozen per-node embedding rows split into the user and item blocks.
struct EmbeddingTable {
  std::int64_t num_users = 0;
  std::int64_t num_items = 0;
  std::int64_t dim = 0;
  EmbeddingMethod method_tag = EmbeddingMethod::ssb;
  DenseMatrix user_rows;  // num_users x dim
  DenseMatrix item_rows;  // num_items x dim

  const double* user(std::int64_t u) const { return user_rows.row(u); }
  const double* item(std::int64_t i) const { return item_rows.row(i); }
};

// One-hop embeddings: node row x of u * diag(s) from the factorization of the
// normalized (m+n)-node adjacency; rows 0..m-1 become users, the rest items.
EmbeddingTable ssb_embeddings(const TsvdResult& f, std::int64_t num_users,
                              std::int64_t num_items);

// Two-hop embeddings: per-node concatenation [row(f1) | row(f2)] of equal-rank
// factorizations of the normalized adjacency and its square; dim is 2k.
EmbeddingTable tsa_embeddings(const TsvdResult& f1, const TsvdResult& f2,
                              std::int64_t num_users, std::int64_t num_items);

}  // namespace svdrec
