#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svdrec/dataset.hpp"
#include "svdrec/dense_matrix.hpp"
#include "svdrec/embedding.hpp"
#include "svdrec/model.hpp"

namespace svdrec {

// Which items compete for a user's top-k list. all_non_train ranks every item
// the user has not interacted with in train, which is the protocol the
// reference numbers use. test_only restricts candidates to the user's own
// test items; with every candidate relevant the metrics saturate, so this
// mode exists for comparison only.
enum class CandidateSet {
  all_non_train,
  test_only,
};

struct EvalReport {
  std::int64_t k = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  std::int64_t users_evaluated = 0;  // users with at least one test item
};

// Concatenated representation [x | m1 | m2] for each row of `rows`,
// stacked into a (rows.rows) x (d + 2h) matrix.
DenseMatrix concat_representations(const ModelParams& p, const DenseMatrix& rows);

// Ranks candidate items for user u by model score (ties broken toward the
// smaller item id) and returns the top k ids in rank order. `exclude` must be
// sorted ascending; excluded ids never appear in the result.
std::vector<std::int64_t> top_k_items(const ModelParams& p, const EmbeddingTable& e,
                                      std::int64_t u, std::int64_t k,
                                      std::span<const std::int64_t> exclude);

// |ranked[0..k) intersect test| / |test|. `test_items` must be sorted and
// nonempty.
double recall_at_k(std::span<const std::int64_t> ranked, std::span<const std::int64_t> test_items,
                   std::int64_t k);

// DCG over the first k ranks (gain 1/log2(rank+1) per hit, ranks 1-based)
// divided by the ideal DCG for min(k, |test|) hits. `test_items` must be
// sorted and nonempty.
double ndcg_at_k(std::span<const std::int64_t> ranked, std::span<const std::int64_t> test_items,
                 std::int64_t k);

// Mean Recall@k and NDCG@k over all users with a nonempty test list.
EvalReport evaluate(const ModelParams& p, const EmbeddingTable& e, const InteractionDataset& d,
                    std::int64_t k, CandidateSet candidates = CandidateSet::all_non_train);

}  // namespace svdrec
