#pragma once

#include <cstdint>
#include <vector>

namespace svdrec {

// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::int64_t r, std::int64_t c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  DenseMatrix(std::int64_t r, std::int64_t c, std::vector<double> d)
      : rows(r), cols(c), data(std::move(d)) {}

  double& operator()(std::int64_t i, std::int64_t j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(std::int64_t i, std::int64_t j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  double* row(std::int64_t i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(std::int64_t i) const {
    return data.data() + static_cast<std::size_t>(i) * cols;
  }

  static DenseMatrix identity(std::int64_t n);
};

DenseMatrix transposed(const DenseMatrix& a);

// c = a * b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// c = a^T * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// c = a * b^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& a);

struct QrResult {
  DenseMatrix q;  // rows x cols, orthonormal columns
  DenseMatrix r;  // cols x cols, upper triangular, non-negative diagonal
};

// Thin QR by Householder reflections. Requires a.rows >= a.cols.
QrResult qr_thin(const DenseMatrix& a);

struct SvdResult {
  DenseMatrix u;          // rows x rows
  std::vector<double> s;  // rows, non-increasing, non-negative
  DenseMatrix v;          // cols x rows, orthonormal columns
};

// Full SVD of a small wide matrix (a.rows <= a.cols) by one-sided Jacobi
// applied to a^T. Columns of a^T are rotated until mutually orthogonal; their
// norms are the singular values. Intended for the projected matrix inside the
// randomized factorization, so a.rows stays small.
SvdResult dense_svd_small(const DenseMatrix& a);

}  // namespace svdrec
