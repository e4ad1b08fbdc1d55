#include "svdrec/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace svdrec {

namespace {

void add_row_broadcast(DenseMatrix& a, const std::vector<double>& bias) {
  for (std::int64_t i = 0; i < a.rows; ++i) {
    double* r = a.row(i);
    for (std::int64_t j = 0; j < a.cols; ++j) r[j] += bias[static_cast<std::size_t>(j)];
  }
}

// Candidate ids from [0, n) minus a sorted exclusion list.
std::vector<std::int64_t> complement_ids(std::int64_t n, std::span<const std::int64_t> exclude) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(n) - exclude.size());
  std::size_t e = 0;
  for (std::int64_t id = 0; id < n; ++id) {
    if (e < exclude.size() && exclude[e] == id) {
      ++e;
      continue;
    }
    out.push_back(id);
  }
  return out;
}

// Keeps the k best candidate ids by score, larger first, smaller id on ties.
void select_top_k(std::vector<std::int64_t>& cand, const double* scores, std::int64_t k) {
  auto better = [scores](std::int64_t a, std::int64_t b) {
    double sa = scores[a];
    double sb = scores[b];
    if (sa != sb) return sa > sb;
    return a < b;
  };
  if (static_cast<std::int64_t>(cand.size()) > k) {
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), better);
    cand.resize(static_cast<std::size_t>(k));
  } else {
    std::sort(cand.begin(), cand.end(), better);
  }
}

double kahan_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

constexpr std::int64_t kUserBlock = 256;

}  // namespace

DenseMatrix concat_representations(const ModelParams& p, const DenseMatrix& rows) {
  if (rows.cols != p.input_dim) {
    throw std::invalid_argument("concat_representations: column count must equal input_dim");
  }
  DenseMatrix m1 = matmul(rows, p.w1);
  add_row_broadcast(m1, p.b1);
  DenseMatrix m2 = matmul(m1, p.w2);
  add_row_broadcast(m2, p.b2);
  DenseMatrix out(rows.rows, p.concat_dim());
  for (std::int64_t i = 0; i < rows.rows; ++i) {
    double* dst = out.row(i);
    std::memcpy(dst, rows.row(i), static_cast<std::size_t>(rows.cols) * sizeof(double));
    std::memcpy(dst + rows.cols, m1.row(i), static_cast<std::size_t>(p.hidden) * sizeof(double));
    std::memcpy(dst + rows.cols + p.hidden, m2.row(i),
                static_cast<std::size_t>(p.hidden) * sizeof(double));
  }
  return out;
}

std::vector<std::int64_t> top_k_items(const ModelParams& p, const EmbeddingTable& e,
                                      std::int64_t u, std::int64_t k,
                                      std::span<const std::int64_t> exclude) {
  if (u < 0 || u >= e.num_users) throw std::out_of_range("top_k_items: user out of range");
  if (k < 0) throw std::invalid_argument("top_k_items: k must be non-negative");
  if (!std::is_sorted(exclude.begin(), exclude.end())) {
    throw std::invalid_argument("top_k_items: exclude list must be sorted ascending");
  }

  DenseMatrix urow(1, e.dim);
  std::memcpy(urow.row(0), e.user(u), static_cast<std::size_t>(e.dim) * sizeof(double));
  DenseMatrix cu = concat_representations(p, urow);
  DenseMatrix ci = concat_representations(p, e.item_rows);
  DenseMatrix s = matmul_nt(cu, ci);  // 1 x num_items

  std::vector<std::int64_t> cand = complement_ids(e.num_items, exclude);
  select_top_k(cand, s.row(0), k);
  return cand;
}

double recall_at_k(std::span<const std::int64_t> ranked, std::span<const std::int64_t> test_items,
                   std::int64_t k) {
  if (k < 1) throw std::invalid_argument("recall_at_k: k must be positive");
  if (test_items.empty()) throw std::invalid_argument("recall_at_k: empty test set");
  std::size_t limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  std::int64_t hits = 0;
  for (std::size_t r = 0; r < limit; ++r) {
    if (std::binary_search(test_items.begin(), test_items.end(), ranked[r])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test_items.size());
}

double ndcg_at_k(std::span<const std::int64_t> ranked, std::span<const std::int64_t> test_items,
                 std::int64_t k) {
  if (k < 1) throw std::invalid_argument("ndcg_at_k: k must be positive");
  if (test_items.empty()) throw std::invalid_argument("ndcg_at_k: empty test set");
  std::size_t limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t r = 0; r < limit; ++r) {
    if (std::binary_search(test_items.begin(), test_items.end(), ranked[r])) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double idcg = 0.0;
  std::int64_t ideal = std::min<std::int64_t>(k, static_cast<std::int64_t>(test_items.size()));
  for (std::int64_t r = 1; r <= ideal; ++r) {
    idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  }
  return dcg / idcg;
}

EvalReport evaluate(const ModelParams& p, const EmbeddingTable& e, const InteractionDataset& d,
                    std::int64_t k, CandidateSet candidates) {
  if (k < 1) throw std::invalid_argument("evaluate: k must be positive");
  if (e.num_users != d.num_users || e.num_items != d.num_items) {
    throw std::invalid_argument("evaluate: embedding table does not match dataset");
  }

  DenseMatrix ci = concat_representations(p, e.item_rows);

  std::vector<double> recall_per_user(static_cast<std::size_t>(d.num_users), 0.0);
  std::vector<double> ndcg_per_user(static_cast<std::size_t>(d.num_users), 0.0);
  std::vector<char> counted(static_cast<std::size_t>(d.num_users), 0);

  for (std::int64_t base = 0; base < d.num_users; base += kUserBlock) {
    const std::int64_t len = std::min(kUserBlock, d.num_users - base);
    DenseMatrix ublock(len, e.dim);
    for (std::int64_t i = 0; i < len; ++i) {
      std::memcpy(ublock.row(i), e.user(base + i),
                  static_cast<std::size_t>(e.dim) * sizeof(double));
    }
    DenseMatrix cu = concat_representations(p, ublock);
    DenseMatrix s = matmul_nt(cu, ci);  // len x num_items

#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < len; ++i) {
      const std::int64_t u = base + i;
      const auto& test_items = d.test[static_cast<std::size_t>(u)];
      if (test_items.empty()) continue;
      const auto& train_items = d.train[static_cast<std::size_t>(u)];

      std::vector<std::int64_t> cand;
      if (candidates == CandidateSet::all_non_train) {
        cand = complement_ids(d.num_items, train_items);
      } else {
        cand = test_items;
      }
      select_top_k(cand, s.row(i), k);

      recall_per_user[static_cast<std::size_t>(u)] = recall_at_k(cand, test_items, k);
      ndcg_per_user[static_cast<std::size_t>(u)] = ndcg_at_k(cand, test_items, k);
      counted[static_cast<std::size_t>(u)] = 1;
    }
  }

  std::vector<double> recalls;
  std::vector<double> ndcgs;
  for (std::int64_t u = 0; u < d.num_users; ++u) {
    if (!counted[static_cast<std::size_t>(u)]) continue;
    recalls.push_back(recall_per_user[static_cast<std::size_t>(u)]);
    ndcgs.push_back(ndcg_per_user[static_cast<std::size_t>(u)]);
  }

  EvalReport rep;
  rep.k = k;
  rep.users_evaluated = static_cast<std::int64_t>(recalls.size());
  if (!recalls.empty()) {
    rep.recall = kahan_sum(recalls) / static_cast<double>(recalls.size());
    rep.ndcg = kahan_sum(ndcgs) / static_cast<double>(ndcgs.size());
  }
  return rep;
}

}  // namespace svdrec
