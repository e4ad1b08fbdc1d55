#include "svdrec/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace svdrec {

double SparseMatrix::at(std::int64_t r, std::int64_t c) const {
  const auto begin = col_idx.begin() + row_ptr[r];
  const auto end = col_idx.begin() + row_ptr[r + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

SparseMatrix SparseMatrix::from_triplets(std::int64_t rows, std::int64_t cols,
                                         const std::vector<std::int64_t>& ri,
                                         const std::vector<std::int64_t>& ci,
                                         const std::vector<double>& vals) {
  if (ri.size() != ci.size() || ri.size() != vals.size())
    throw std::invalid_argument("from_triplets: array lengths differ");
  std::vector<std::size_t> order(ri.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ri[a] != ri[b] ? ri[a] < ri[b] : ci[a] < ci[b];
  });

  SparseMatrix m(rows, cols);
  for (std::size_t t = 0; t < order.size();) {
    const std::int64_t r = ri[order[t]], c = ci[order[t]];
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::invalid_argument("from_triplets: index out of range");
    double acc = 0.0;
    while (t < order.size() && ri[order[t]] == r && ci[order[t]] == c) acc += vals[order[t++]];
    if (acc != 0.0) {
      m.col_idx.push_back(c);
      m.values.push_back(acc);
      m.row_ptr[r + 1] = static_cast<std::int64_t>(m.values.size());
    }
  }
  for (std::int64_t r = 0; r < rows; ++r)
    m.row_ptr[r + 1] = std::max(m.row_ptr[r + 1], m.row_ptr[r]);
  return m;
}

void SparseMatrix::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::runtime_error("SparseMatrix: " + what);
  };
  if (rows < 0 || cols < 0) fail("negative dimension");
  if (static_cast<std::int64_t>(row_ptr.size()) != rows + 1) fail("row_ptr length");
  if (row_ptr.front() != 0) fail("row_ptr[0] != 0");
  if (col_idx.size() != values.size()) fail("col_idx/values length mismatch");
  if (row_ptr.back() != nnz()) fail("row_ptr[rows] != nnz");
  for (std::int64_t r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) fail("row_ptr decreasing");
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= cols) fail("column index out of range");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1]) fail("columns not strictly increasing");
      if (values[k] == 0.0) fail("explicit zero stored");
      if (!std::isfinite(values[k])) fail("non-finite value");
    }
  }
}

SparseMatrix transpose(const SparseMatrix& m) {
  SparseMatrix t(m.cols, m.rows);
  t.col_idx.resize(m.values.size());
  t.values.resize(m.values.size());

  std::vector<std::int64_t> count(m.cols, 0);
  for (std::int64_t c : m.col_idx) ++count[c];
  for (std::int64_t c = 0; c < m.cols; ++c) t.row_ptr[c + 1] = t.row_ptr[c] + count[c];

  std::vector<std::int64_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::int64_t r = 0; r < m.rows; ++r) {
    for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      const std::int64_t pos = cursor[m.col_idx[k]]++;
      t.col_idx[pos] = r;
      t.values[pos] = m.values[k];
    }
  }
  return t;
}

SparseMatrix spmm(const SparseMatrix& a, const SparseMatrix& b, double drop_tol) {
  if (a.cols != b.rows) throw std::invalid_argument("spmm: inner dimensions differ");

  SparseMatrix c(a.rows, b.cols);
  std::vector<std::int64_t> row_nnz(a.rows, 0);

  // Pass 1: count distinct columns per output row.
#pragma omp parallel
  {
    std::vector<std::int64_t> mark(b.cols, -1);
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < a.rows; ++i) {
      std::int64_t n = 0;
      for (std::int64_t ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
        const std::int64_t k = a.col_idx[ka];
        for (std::int64_t kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
          const std::int64_t j = b.col_idx[kb];
          if (mark[j] != i) {
            mark[j] = i;
            ++n;
          }
        }
      }
      row_nnz[i] = n;
    }
  }

  for (std::int64_t i = 0; i < a.rows; ++i) c.row_ptr[i + 1] = c.row_ptr[i] + row_nnz[i];
  c.col_idx.resize(c.row_ptr.back());
  c.values.resize(c.row_ptr.back());

  // Pass 2: accumulate each row in a dense scratch, emit in column order.
  std::vector<std::int64_t> kept(a.rows, 0);
#pragma omp parallel
  {
    std::vector<std::int64_t> mark(b.cols, -1);
    std::vector<double> acc(b.cols, 0.0);
    std::vector<std::int64_t> touched;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < a.rows; ++i) {
      touched.clear();
      for (std::int64_t ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
        const std::int64_t k = a.col_idx[ka];
        const double av = a.values[ka];
        for (std::int64_t kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
          const std::int64_t j = b.col_idx[kb];
          if (mark[j] != i) {
            mark[j] = i;
            acc[j] = av * b.values[kb];
            touched.push_back(j);
          } else {
            acc[j] += av * b.values[kb];
          }
        }
      }
      std::sort(touched.begin(), touched.end());
      std::int64_t pos = c.row_ptr[i];
      for (std::int64_t j : touched) {
        if (std::abs(acc[j]) <= drop_tol) continue;
        c.col_idx[pos] = j;
        c.values[pos] = acc[j];
        ++pos;
      }
      kept[i] = pos - c.row_ptr[i];
    }
  }

  // Compact in place when the drop tolerance removed entries. Writes never
  // pass reads because rows only shrink.
  std::int64_t write = 0;
  for (std::int64_t i = 0; i < a.rows; ++i) {
    const std::int64_t start = c.row_ptr[i];
    c.row_ptr[i] = write;
    for (std::int64_t k = 0; k < kept[i]; ++k) {
      c.col_idx[write] = c.col_idx[start + k];
      c.values[write] = c.values[start + k];
      ++write;
    }
  }
  c.row_ptr[a.rows] = write;
  c.col_idx.resize(write);
  c.values.resize(write);
  c.col_idx.shrink_to_fit();
  c.values.shrink_to_fit();
  return c;
}

DenseMatrix spmm_dense(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("spmm_dense: inner dimensions differ");
  DenseMatrix c(a.rows, b.cols);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double av = a.values[k];
      const double* bk = b.row(a.col_idx[k]);
      for (std::int64_t j = 0; j < b.cols; ++j) ci[j] += av * bk[j];
    }
  }
  return c;
}

DenseMatrix to_dense(const SparseMatrix& m) {
  DenseMatrix d(m.rows, m.cols);
  for (std::int64_t r = 0; r < m.rows; ++r)
    for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      d(r, m.col_idx[k]) = m.values[k];
  return d;
}

}  // namespace svdrec
