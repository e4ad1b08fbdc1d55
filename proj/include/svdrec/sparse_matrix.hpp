#pragma once

#include <cstdint>
#include <vector>

#include "svdrec/dense_matrix.hpp"

namespace svdrec {

// Compressed sparse row matrix of doubles.
//
// Invariants: row_ptr has rows+1 non-decreasing offsets starting at 0;
// col_idx is strictly increasing within each row; no explicit zeros.
struct SparseMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int64_t> col_idx;
  std::vector<double> values;

  SparseMatrix() : row_ptr(1, 0) {}
  SparseMatrix(std::int64_t r, std::int64_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

  std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

  // Entry lookup by binary search; zero when absent.
  double at(std::int64_t r, std::int64_t c) const;

  // Builds from (row, col, value) triplets in any order. Duplicates are
  // summed, exact zeros dropped.
  static SparseMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                    const std::vector<std::int64_t>& ri,
                                    const std::vector<std::int64_t>& ci,
                                    const std::vector<double>& vals);

  // Throws std::runtime_error when a CSR invariant is violated.
  void validate() const;
};

SparseMatrix transpose(const SparseMatrix& m);

// Sparse-sparse product by Gustavson's row-wise algorithm: each output row is
// accumulated in a dense scratch of length b.cols. Entries with magnitude
// <= drop_tol are removed (default keeps everything except exact zeros).
SparseMatrix spmm(const SparseMatrix& a, const SparseMatrix& b, double drop_tol = 0.0);

DenseMatrix spmm_dense(const SparseMatrix& a, const DenseMatrix& b);

DenseMatrix to_dense(const SparseMatrix& m);

}  // namespace svdrec
