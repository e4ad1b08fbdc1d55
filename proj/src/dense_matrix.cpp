#include "svdrec/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svdrec {

DenseMatrix DenseMatrix::identity(std::int64_t n) {
  DenseMatrix m(n, n);
  for (std::int64_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix transposed(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (std::int64_t i = 0; i < a.rows; ++i)
    for (std::int64_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions differ");
  DenseMatrix c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::int64_t k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::int64_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: row counts differ");
  DenseMatrix c(a.cols, b.cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < a.cols; ++i) {
    double* ci = c.row(i);
    for (std::int64_t k = 0; k < a.rows; ++k) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      const double* bk = b.row(k);
      for (std::int64_t j = 0; j < b.cols; ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: column counts differ");
  DenseMatrix c(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (std::int64_t j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double acc = 0.0;
      for (std::int64_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
      ci[j] = acc;
    }
  }
  return c;
}

double frobenius_norm(const DenseMatrix& a) {
  double acc = 0.0;
  for (double x : a.data) acc += x * x;
  return std::sqrt(acc);
}

QrResult qr_thin(const DenseMatrix& a) {
  const std::int64_t m = a.rows, n = a.cols;
  if (m < n) throw std::invalid_argument("qr_thin: requires rows >= cols");

  // Householder vectors are stored below the diagonal of w (normalized so the
  // leading entry is 1), with scale factors in tau.
  DenseMatrix w = a;
  std::vector<double> tau(n, 0.0);

  for (std::int64_t j = 0; j < n; ++j) {
    double sigma = 0.0;
    for (std::int64_t i = j; i < m; ++i) sigma += w(i, j) * w(i, j);
    sigma = std::sqrt(sigma);
    if (sigma == 0.0) continue;

    const double x0 = w(j, j);
    const double alpha = x0 >= 0.0 ? -sigma : sigma;
    const double v0 = x0 - alpha;
    // ||v||^2 = 2 sigma (sigma + |x0|); tau = 2 v0^2 / ||v||^2
    const double vnorm2 = 2.0 * sigma * (sigma + std::abs(x0));
    tau[j] = 2.0 * v0 * v0 / vnorm2;

    // Normalize v so v[j] = 1.
    for (std::int64_t i = j + 1; i < m; ++i) w(i, j) /= v0;

    // Apply the reflector to the trailing columns.
    for (std::int64_t l = j + 1; l < n; ++l) {
      double dot = w(j, l);
      for (std::int64_t i = j + 1; i < m; ++i) dot += w(i, j) * w(i, l);
      dot *= tau[j];
      w(j, l) -= dot;
      for (std::int64_t i = j + 1; i < m; ++i) w(i, l) -= dot * w(i, j);
    }
    w(j, j) = alpha;
  }

  QrResult out;
  out.r = DenseMatrix(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i; j < n; ++j) out.r(i, j) = w(i, j);

  // Accumulate the thin Q by applying reflectors to the first n columns of I,
  // last reflector first.
  out.q = DenseMatrix(m, n);
  for (std::int64_t j = 0; j < n; ++j) out.q(j, j) = 1.0;
  for (std::int64_t j = n - 1; j >= 0; --j) {
    if (tau[j] == 0.0) continue;
    for (std::int64_t l = 0; l < n; ++l) {
      double dot = out.q(j, l);
      for (std::int64_t i = j + 1; i < m; ++i) dot += w(i, j) * out.q(i, l);
      dot *= tau[j];
      out.q(j, l) -= dot;
      for (std::int64_t i = j + 1; i < m; ++i) out.q(i, l) -= dot * w(i, j);
    }
  }

  // Fix signs so the diagonal of R is non-negative.
  for (std::int64_t j = 0; j < n; ++j) {
    if (out.r(j, j) < 0.0) {
      for (std::int64_t l = j; l < n; ++l) out.r(j, l) = -out.r(j, l);
      for (std::int64_t i = 0; i < m; ++i) out.q(i, j) = -out.q(i, j);
    }
  }
  return out;
}

namespace {

// Fills columns [filled, total) of g with unit vectors orthogonal to all
// previous columns, by orthogonalizing canonical basis vectors.
void complete_orthonormal(DenseMatrix& g, std::int64_t filled) {
  const std::int64_t n = g.rows, total = g.cols;
  std::int64_t next_axis = 0;
  for (std::int64_t j = filled; j < total; ++j) {
    for (; next_axis <= n; ++next_axis) {
      if (next_axis == n)
        throw std::runtime_error("dense_svd_small: orthonormal completion failed");
      std::vector<double> cand(n, 0.0);
      cand[next_axis] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::int64_t l = 0; l < j; ++l) {
          double dot = 0.0;
          for (std::int64_t i = 0; i < n; ++i) dot += cand[i] * g(i, l);
          for (std::int64_t i = 0; i < n; ++i) cand[i] -= dot * g(i, l);
        }
      }
      double norm = 0.0;
      for (double x : cand) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 0.5) {
        for (std::int64_t i = 0; i < n; ++i) g(i, j) = cand[i] / norm;
        ++next_axis;
        break;
      }
    }
  }
}

}  // namespace

SvdResult dense_svd_small(const DenseMatrix& a) {
  const std::int64_t r = a.rows, c = a.cols;
  if (r > c)
    throw std::invalid_argument("dense_svd_small: requires rows <= cols (factor the transpose)");
  for (double x : a.data)
    if (!std::isfinite(x)) throw std::invalid_argument("dense_svd_small: non-finite input");

  // One-sided Jacobi on g = a^T: rotate pairs of columns until orthogonal.
  // At convergence g = v * diag(s) and the accumulated rotations form u, so
  // a = u diag(s) v^T.
  DenseMatrix g = transposed(a);  // c x r
  DenseMatrix u = DenseMatrix::identity(r);

  const double tol = 1e-15;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::int64_t p = 0; p < r - 1; ++p) {
      for (std::int64_t q = p + 1; q < r; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::int64_t i = 0; i < c; ++i) {
          const double gp = g(i, p), gq = g(i, q);
          alpha += gp * gp;
          beta += gq * gq;
          gamma += gp * gq;
        }
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;

        for (std::int64_t i = 0; i < c; ++i) {
          const double gp = g(i, p), gq = g(i, q);
          g(i, p) = cs * gp - sn * gq;
          g(i, q) = sn * gp + cs * gq;
        }
        for (std::int64_t i = 0; i < r; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = cs * up - sn * uq;
          u(i, q) = sn * up + cs * uq;
        }
      }
    }
    if (!rotated) break;
  }

  // Singular values are the column norms of g.
  std::vector<double> s(r, 0.0);
  for (std::int64_t j = 0; j < r; ++j) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < c; ++i) acc += g(i, j) * g(i, j);
    s[j] = std::sqrt(acc);
  }

  // Sort non-increasing, permuting u and g alongside.
  std::vector<std::int64_t> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t x, std::int64_t y) { return s[x] > s[y]; });

  SvdResult out;
  out.s.resize(r);
  out.u = DenseMatrix(r, r);
  out.v = DenseMatrix(c, r);
  const double s_max = s.empty() ? 0.0 : s[order.empty() ? 0 : order[0]];
  std::int64_t well_conditioned = 0;
  for (std::int64_t j = 0; j < r; ++j) {
    const std::int64_t src = order[j];
    out.s[j] = s[src];
    for (std::int64_t i = 0; i < r; ++i) out.u(i, j) = u(i, src);
    if (s[src] > s_max * 1e-13 && s[src] > 0.0) {
      for (std::int64_t i = 0; i < c; ++i) out.v(i, j) = g(i, src) / s[src];
      well_conditioned = j + 1;
    }
  }
  // Columns whose singular value vanished carry no direction information;
  // replace them with an orthonormal completion.
  if (well_conditioned < r) complete_orthonormal(out.v, well_conditioned);
  return out;
}

}  // namespace svdrec
