#pragma once

#include <cstdint>
#include <vector>

#include "svdrec/dataset.hpp"
#include "svdrec/sparse_matrix.hpp"

namespace svdrec {

// Per-node degree counts of a 0/1 matrix (entries per row).
using DegreeVector = std::vector<std::int64_t>;

DegreeVector node_degrees(const SparseMatrix& a_sym);

// m x n binary adjacency from the train split; test interactions excluded.
SparseMatrix build_adjacency(const InteractionDataset& d);

// Symmetric (m+n) x (m+n) block matrix: the input in the upper-right block,
// its transpose lower-left, zero diagonal blocks. Node ids: users 0..m-1,
// items m..m+n-1. The embedding split depends on this ordering.
SparseMatrix symmetrize(const SparseMatrix& a);

// Degree-normalized adjacency: entry (x, y) becomes a_xy / sqrt(d_x d_y)
// where d is the row sum. Rows and columns of zero-degree nodes stay zero.
// Throws on negative entries.
SparseMatrix laplacian_normalize(const SparseMatrix& a_sym);

// Exact square of a normalized adjacency. For a bipartite input the result is
// block-diagonal over the user/item partition.
SparseMatrix matrix_power2(const SparseMatrix& a_norm, double drop_tol = 0.0);

}  // namespace svdrec
