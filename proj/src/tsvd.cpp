#include "svdrec/tsvd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svdrec/rng.hpp"

namespace svdrec {

TsvdResult truncated_svd(const SparseMatrix& m, const TsvdParams& p) {
  if (p.k < 1) throw std::invalid_argument("truncated_svd: k must be >= 1");
  const std::int64_t sketch = p.k + p.oversampling;
  if (sketch > std::min(m.rows, m.cols))
    throw std::invalid_argument("truncated_svd: k + oversampling exceeds min(rows, cols)");

  const SparseMatrix mt = transpose(m);

  // Gaussian sketch, filled row by row.
  DenseMatrix omega(m.cols, sketch);
  Rng rng(p.seed);
  for (double& x : omega.data) x = rng.gaussian();

  DenseMatrix y = spmm_dense(m, omega);
  for (std::int64_t it = 0; it < p.power_iters; ++it) {
    DenseMatrix z = qr_thin(y).q;
    DenseMatrix w = qr_thin(spmm_dense(mt, z)).q;
    y = spmm_dense(m, w);
  }
  DenseMatrix q = qr_thin(y).q;  // rows x sketch

  // Project: b = q^T m, computed as (m^T q)^T so the sparse kernel applies.
  DenseMatrix b = transposed(spmm_dense(mt, q));  // sketch x cols
  SvdResult small = dense_svd_small(b);

  DenseMatrix u_full = matmul(q, small.u);  // rows x sketch

  TsvdResult out;
  out.u = DenseMatrix(m.rows, p.k);
  out.v = DenseMatrix(m.cols, p.k);
  out.s.assign(small.s.begin(), small.s.begin() + p.k);
  for (std::int64_t i = 0; i < m.rows; ++i)
    for (std::int64_t j = 0; j < p.k; ++j) out.u(i, j) = u_full(i, j);
  for (std::int64_t i = 0; i < m.cols; ++i)
    for (std::int64_t j = 0; j < p.k; ++j) out.v(i, j) = small.v(i, j);

  // Sign convention: the largest-magnitude entry of each u column (first on
  // ties) is made positive, flipping the v column alongside.
  for (std::int64_t j = 0; j < p.k; ++j) {
    std::int64_t arg = 0;
    double best = -1.0;
    for (std::int64_t i = 0; i < m.rows; ++i) {
      const double mag = std::abs(out.u(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (out.u(arg, j) < 0.0) {
      for (std::int64_t i = 0; i < m.rows; ++i) out.u(i, j) = -out.u(i, j);
      for (std::int64_t i = 0; i < m.cols; ++i) out.v(i, j) = -out.v(i, j);
    }
  }
  return out;
}

}  // namespace svdrec
