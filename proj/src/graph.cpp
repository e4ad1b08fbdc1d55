#include "svdrec/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace svdrec {

DegreeVector node_degrees(const SparseMatrix& a_sym) {
  DegreeVector degrees(a_sym.rows);
  for (std::int64_t r = 0; r < a_sym.rows; ++r)
    degrees[r] = a_sym.row_ptr[r + 1] - a_sym.row_ptr[r];
  return degrees;
}

SparseMatrix build_adjacency(const InteractionDataset& d) {
  SparseMatrix a(d.num_users, d.num_items);
  std::int64_t nnz = 0;
  for (const auto& items : d.train) nnz += static_cast<std::int64_t>(items.size());
  a.col_idx.reserve(nnz);
  a.values.reserve(nnz);
  for (std::int64_t u = 0; u < d.num_users; ++u) {
    for (std::int64_t i : d.train[u]) {
      a.col_idx.push_back(i);
      a.values.push_back(1.0);
    }
    a.row_ptr[u + 1] = static_cast<std::int64_t>(a.col_idx.size());
  }
  return a;
}

SparseMatrix symmetrize(const SparseMatrix& a) {
  const std::int64_t m = a.rows, n = a.cols;
  const SparseMatrix at = transpose(a);

  SparseMatrix s(m + n, m + n);
  s.col_idx.reserve(2 * a.values.size());
  s.values.reserve(2 * a.values.size());
  for (std::int64_t u = 0; u < m; ++u) {
    for (std::int64_t k = a.row_ptr[u]; k < a.row_ptr[u + 1]; ++k) {
      s.col_idx.push_back(m + a.col_idx[k]);  // items occupy ids m..m+n-1
      s.values.push_back(a.values[k]);
    }
    s.row_ptr[u + 1] = static_cast<std::int64_t>(s.col_idx.size());
  }
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t k = at.row_ptr[i]; k < at.row_ptr[i + 1]; ++k) {
      s.col_idx.push_back(at.col_idx[k]);
      s.values.push_back(at.values[k]);
    }
    s.row_ptr[m + i + 1] = static_cast<std::int64_t>(s.col_idx.size());
  }
  return s;
}

SparseMatrix laplacian_normalize(const SparseMatrix& a_sym) {
  if (a_sym.rows != a_sym.cols)
    throw std::invalid_argument("laplacian_normalize: matrix must be square");
  std::vector<double> row_sum(a_sym.rows, 0.0);
  for (std::int64_t r = 0; r < a_sym.rows; ++r) {
    for (std::int64_t k = a_sym.row_ptr[r]; k < a_sym.row_ptr[r + 1]; ++k) {
      if (a_sym.values[k] < 0.0)
        throw std::invalid_argument("laplacian_normalize: negative entry");
      row_sum[r] += a_sym.values[k];
    }
  }
  std::vector<double> inv_sqrt(a_sym.rows, 0.0);
  for (std::int64_t r = 0; r < a_sym.rows; ++r)
    if (row_sum[r] > 0.0) inv_sqrt[r] = 1.0 / std::sqrt(row_sum[r]);

  SparseMatrix out = a_sym;
  for (std::int64_t r = 0; r < out.rows; ++r) {
    for (std::int64_t k = out.row_ptr[r]; k < out.row_ptr[r + 1]; ++k) {
      // The scale product commutes exactly, so the (x,y) and (y,x) entries of
      // a symmetric input stay bit-identical.
      out.values[k] *= inv_sqrt[r] * inv_sqrt[out.col_idx[k]];
    }
  }
  return out;
}

SparseMatrix matrix_power2(const SparseMatrix& a_norm, double drop_tol) {
  if (a_norm.rows != a_norm.cols)
    throw std::invalid_argument("matrix_power2: matrix must be square");
  return spmm(a_norm, a_norm, drop_tol);
}

}  // namespace svdrec
