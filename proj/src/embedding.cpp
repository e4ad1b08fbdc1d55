#include "svdrec/embedding.hpp"

#include <stdexcept>

namespace svdrec {

namespace {

// Scatter rows of u * diag(s) into the user/item blocks starting at column
// dst_col of a preallocated table.
void fill_block(EmbeddingTable& table, const TsvdResult& f, std::int64_t dst_col) {
  const std::int64_t k = static_cast<std::int64_t>(f.s.size());
  for (std::int64_t x = 0; x < f.u.rows; ++x) {
    const bool is_user = x < table.num_users;
    double* dst = is_user ? table.user_rows.row(x) : table.item_rows.row(x - table.num_users);
    for (std::int64_t j = 0; j < k; ++j) dst[dst_col + j] = f.u(x, j) * f.s[j];
  }
}

}  // namespace

EmbeddingTable ssb_embeddings(const TsvdResult& f, std::int64_t num_users,
                              std::int64_t num_items) {
  if (f.u.rows != num_users + num_items)
    throw std::invalid_argument("ssb_embeddings: factor rows != num_users + num_items");
  EmbeddingTable t;
  t.num_users = num_users;
  t.num_items = num_items;
  t.dim = static_cast<std::int64_t>(f.s.size());
  t.method_tag = EmbeddingMethod::ssb;
  t.user_rows = DenseMatrix(num_users, t.dim);
  t.item_rows = DenseMatrix(num_items, t.dim);
  fill_block(t, f, 0);
  return t;
}

EmbeddingTable tsa_embeddings(const TsvdResult& f1, const TsvdResult& f2,
                              std::int64_t num_users, std::int64_t num_items) {
  if (f1.u.rows != num_users + num_items || f2.u.rows != num_users + num_items)
    throw std::invalid_argument("tsa_embeddings: factor rows != num_users + num_items");
  if (f1.s.size() != f2.s.size())
    throw std::invalid_argument("tsa_embeddings: per-hop ranks differ");
  const std::int64_t k = static_cast<std::int64_t>(f1.s.size());

  EmbeddingTable t;
  t.num_users = num_users;
  t.num_items = num_items;
  t.dim = 2 * k;
  t.method_tag = EmbeddingMethod::tsa;
  t.user_rows = DenseMatrix(num_users, t.dim);
  t.item_rows = DenseMatrix(num_items, t.dim);
  fill_block(t, f1, 0);
  fill_block(t, f2, k);
  return t;
}

}  // namespace svdrec
