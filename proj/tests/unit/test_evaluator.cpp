#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "svdrec/evaluator.hpp"
#include "svdrec/rng.hpp"

using namespace svdrec;
namespace oracle = svdrec::testing;

namespace {

EmbeddingTable random_table(std::int64_t users, std::int64_t items, std::int64_t dim,
                            std::uint64_t seed) {
  EmbeddingTable e;
  e.num_users = users;
  e.num_items = items;
  e.dim = dim;
  e.user_rows = DenseMatrix(users, dim);
  e.item_rows = DenseMatrix(items, dim);
  Rng rng(seed);
  for (double& v : e.user_rows.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : e.item_rows.data) v = rng.uniform(-1.0, 1.0);
  return e;
}

ModelParams random_params(std::int64_t d, std::int64_t h, std::uint64_t seed) {
  ModelParams p = ModelParams::init(d, h, seed);
  Rng rng(seed + 500);
  for (double& b : p.b1) b = rng.uniform(-0.3, 0.3);
  for (double& b : p.b2) b = rng.uniform(-0.3, 0.3);
  return p;
}

// Rank every candidate by brute force: stable order on (-score, id).
std::vector<std::int64_t> brute_force_ranking(const ModelParams& p, const EmbeddingTable& e,
                                              std::int64_t u,
                                              const std::vector<std::int64_t>& exclude) {
  std::vector<std::pair<double, std::int64_t>> scored;
  for (std::int64_t i = 0; i < e.num_items; ++i) {
    if (std::binary_search(exclude.begin(), exclude.end(), i)) continue;
    scored.emplace_back(score(p, std::span<const double>(e.user(u), e.dim),
                              std::span<const double>(e.item(i), e.dim)),
                        i);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::int64_t> ids;
  for (const auto& [s, i] : scored) ids.push_back(i);
  return ids;
}

// Zero-weight params make the score the raw embedding dot product.
ModelParams passthrough_params(std::int64_t d) {
  ModelParams p = ModelParams::init(d, 1, 0);
  p.w1.data.assign(p.w1.data.size(), 0.0);
  p.w2.data.assign(p.w2.data.size(), 0.0);
  return p;
}

}  // namespace

TEST_CASE("concat_representations stacks forward outputs row by row") {
  const EmbeddingTable e = random_table(4, 6, 5, 1);
  const ModelParams p = random_params(5, 3, 2);
  const DenseMatrix reps = concat_representations(p, e.item_rows);
  CHECK(reps.rows == 6);
  CHECK(reps.cols == p.concat_dim());
  for (std::int64_t i = 0; i < 6; ++i) {
    const std::vector<double> want = forward(p, std::span<const double>(e.item(i), 5));
    for (std::int64_t j = 0; j < reps.cols; ++j)
      CHECK(reps(i, j) == doctest::Approx(want[j]).epsilon(1e-13));
  }
}

TEST_CASE("top_k ranks by score with the hand-built three-item example") {
  // One user with a 1-d passthrough model: items score 0.5, 0.7, 0.9; item 1
  // is excluded as a train interaction, so top-2 is item 2 then item 0.
  EmbeddingTable e = random_table(1, 3, 1, 3);
  e.user_rows(0, 0) = 1.0;
  e.item_rows(0, 0) = 0.5;
  e.item_rows(1, 0) = 0.7;
  e.item_rows(2, 0) = 0.9;
  const ModelParams p = passthrough_params(1);
  const std::vector<std::int64_t> exclude = {1};
  const std::vector<std::int64_t> top = top_k_items(p, e, 0, 2, exclude);
  CHECK(top == std::vector<std::int64_t>{2, 0});
}

TEST_CASE("ties break toward the smaller item id") {
  EmbeddingTable e = random_table(1, 5, 1, 4);
  e.user_rows(0, 0) = 1.0;
  for (std::int64_t i = 0; i < 5; ++i) e.item_rows(i, 0) = 1.0;
  const ModelParams p = passthrough_params(1);
  const std::vector<std::int64_t> exclude = {2};
  CHECK(top_k_items(p, e, 0, 3, exclude) == std::vector<std::int64_t>{0, 1, 3});
}

TEST_CASE("k larger than the candidate pool returns everything ranked") {
  const EmbeddingTable e = random_table(2, 4, 3, 5);
  const ModelParams p = random_params(3, 2, 6);
  const std::vector<std::int64_t> exclude = {0};
  const std::vector<std::int64_t> top = top_k_items(p, e, 1, 10, exclude);
  CHECK(top.size() == 3);
  CHECK(top == brute_force_ranking(p, e, 1, exclude));
}

TEST_CASE("top_k matches brute force on random instances") {
  Rng rng(7);
  const EmbeddingTable e = random_table(20, 50, 6, 8);
  const ModelParams p = random_params(6, 4, 9);
  for (std::int64_t u = 0; u < 20; ++u) {
    std::vector<std::int64_t> exclude;
    for (std::int64_t i = 0; i < 50; ++i)
      if (rng.uniform() < 0.2) exclude.push_back(i);
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng.uniform_below(12));
    const std::vector<std::int64_t> got = top_k_items(p, e, u, k, exclude);
    std::vector<std::int64_t> want = brute_force_ranking(p, e, u, exclude);
    want.resize(std::min<std::size_t>(want.size(), k));
    CHECK(got == want);
  }
}

TEST_CASE("top_k validates its arguments") {
  const EmbeddingTable e = random_table(2, 3, 2, 10);
  const ModelParams p = passthrough_params(2);
  CHECK_THROWS(top_k_items(p, e, 2, 1, {}));  // user out of range
  CHECK_THROWS(top_k_items(p, e, -1, 1, {}));
  const std::vector<std::int64_t> unsorted = {2, 0};
  CHECK_THROWS(top_k_items(p, e, 0, 1, unsorted));
  CHECK(top_k_items(p, e, 0, 0, {}).empty());
}

TEST_CASE("recall counts the hit fraction") {
  const std::vector<std::int64_t> ranked = {4, 9, 1};
  const std::vector<std::int64_t> test_items = {1, 7};
  // One of the two test items appears in the top 3.
  CHECK(recall_at_k(ranked, test_items, 3) == 0.5);
  const std::vector<std::int64_t> both = {1, 7, 5};
  CHECK(recall_at_k(both, test_items, 3) == 1.0);
  CHECK(recall_at_k(ranked, test_items, 2) == 0.0);
}

TEST_CASE("recall with a short ranking only sees the provided prefix") {
  const std::vector<std::int64_t> ranked = {3};
  const std::vector<std::int64_t> test_items = {3, 8};
  CHECK(recall_at_k(ranked, test_items, 10) == 0.5);
}

TEST_CASE("ndcg closed forms") {
  const std::vector<std::int64_t> test_items = {5};
  // Single relevant item at rank 1 is ideal.
  CHECK(ndcg_at_k(std::vector<std::int64_t>{5, 1, 2}, test_items, 3) == 1.0);
  // At rank 2 the gain is 1/log2(3).
  const double want = 1.0 / std::log2(3.0);
  CHECK(std::abs(ndcg_at_k(std::vector<std::int64_t>{1, 5, 2}, test_items, 3) - want) <= 1e-12);
  // Outside the top k there is no gain.
  CHECK(ndcg_at_k(std::vector<std::int64_t>{1, 2, 5}, test_items, 2) == 0.0);
}

TEST_CASE("ndcg of a full hit list is one") {
  const std::vector<std::int64_t> test_items = {2, 4, 6};
  CHECK(ndcg_at_k(std::vector<std::int64_t>{4, 2, 6}, test_items, 3) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ndcg matches the direct formula on random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t n_items = 30;
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng.uniform_below(10));
    std::vector<std::int64_t> perm(n_items);
    for (std::int64_t i = 0; i < n_items; ++i) perm[i] = i;
    for (std::int64_t i = n_items - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
    const std::int64_t ranked_len = 1 + static_cast<std::int64_t>(rng.uniform_below(n_items));
    std::vector<std::int64_t> ranked(perm.begin(), perm.begin() + ranked_len);
    std::vector<std::int64_t> test_items;
    for (std::int64_t i = 0; i < n_items; ++i)
      if (rng.uniform() < 0.2) test_items.push_back(i);
    if (test_items.empty()) test_items.push_back(perm.back());
    std::sort(test_items.begin(), test_items.end());

    double dcg = 0.0;
    for (std::int64_t r = 0; r < std::min<std::int64_t>(k, ranked_len); ++r)
      if (std::binary_search(test_items.begin(), test_items.end(), ranked[r]))
        dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    double idcg = 0.0;
    const auto ideal = std::min<std::int64_t>(k, static_cast<std::int64_t>(test_items.size()));
    for (std::int64_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);

    const double got = ndcg_at_k(ranked, test_items, k);
    CHECK(std::abs(got - dcg / idcg) <= 1e-12);

    double hits = 0.0;
    for (std::int64_t r = 0; r < std::min<std::int64_t>(k, ranked_len); ++r)
      if (std::binary_search(test_items.begin(), test_items.end(), ranked[r])) hits += 1.0;
    CHECK(recall_at_k(ranked, test_items, k) ==
          doctest::Approx(hits / static_cast<double>(test_items.size())).epsilon(1e-14));
  }
}

TEST_CASE("metrics validate their arguments") {
  const std::vector<std::int64_t> ranked = {1};
  const std::vector<std::int64_t> test_items = {1};
  const std::vector<std::int64_t> empty;
  CHECK_THROWS(recall_at_k(ranked, empty, 1));
  CHECK_THROWS(recall_at_k(ranked, test_items, 0));
  CHECK_THROWS(ndcg_at_k(ranked, empty, 1));
  CHECK_THROWS(ndcg_at_k(ranked, test_items, 0));
}

TEST_CASE("evaluate averages per-user metrics and skips empty test lists") {
  Rng rng(12);
  InteractionDataset d;
  d.num_users = 8;
  d.num_items = 25;
  d.train.resize(8);
  d.test.resize(8);
  for (std::int64_t u = 0; u < 8; ++u) {
    for (std::int64_t i = 0; i < 25; ++i) {
      const double r = rng.uniform();
      if (r < 0.2) d.train[u].push_back(i);
      else if (r < 0.35 && u != 3) d.test[u].push_back(i);  // user 3 has no test items
    }
    if (u != 3 && d.test[u].empty()) {
      // Keep every other user evaluable: claim the first non-train item.
      for (std::int64_t i = 0; i < 25; ++i)
        if (!std::binary_search(d.train[u].begin(), d.train[u].end(), i)) {
          d.test[u].push_back(i);
          break;
        }
    }
  }
  d.test[3].clear();
  d.validate();

  const EmbeddingTable e = random_table(8, 25, 5, 13);
  const ModelParams p = random_params(5, 4, 14);
  const std::int64_t k = 6;
  const EvalReport rep = evaluate(p, e, d, k);
  CHECK(rep.k == k);
  CHECK(rep.users_evaluated == 7);

  double recall_sum = 0.0, ndcg_sum = 0.0;
  for (std::int64_t u = 0; u < 8; ++u) {
    if (d.test[u].empty()) continue;
    const std::vector<std::int64_t> ranked = brute_force_ranking(p, e, u, d.train[u]);
    std::vector<std::int64_t> topk(ranked.begin(),
                                   ranked.begin() + std::min<std::size_t>(ranked.size(), k));
    recall_sum += recall_at_k(topk, d.test[u], k);
    ndcg_sum += ndcg_at_k(topk, d.test[u], k);
  }
  CHECK(rep.recall == doctest::Approx(recall_sum / 7.0).epsilon(1e-13));
  CHECK(rep.ndcg == doctest::Approx(ndcg_sum / 7.0).epsilon(1e-13));
}

TEST_CASE("train items never reach a top list") {
  // A model that loves item 0 best: passthrough with item 0 embedding largest.
  EmbeddingTable e = random_table(3, 6, 1, 15);
  e.user_rows.data.assign(3, 1.0);
  for (std::int64_t i = 0; i < 6; ++i) e.item_rows(i, 0) = 6.0 - static_cast<double>(i);
  const ModelParams p = passthrough_params(1);
  InteractionDataset d;
  d.num_users = 3;
  d.num_items = 6;
  d.train = {{0, 1}, {0}, {}};
  d.test = {{2}, {1}, {0}};
  d.validate();
  for (std::int64_t u = 0; u < 3; ++u) {
    const auto top = top_k_items(p, e, u, 6, d.train[u]);
    for (std::int64_t t : top)
      CHECK(!std::binary_search(d.train[u].begin(), d.train[u].end(), t));
  }
  // User 0 excludes items 0 and 1, so its best candidate is its test item 2.
  CHECK(top_k_items(p, e, 0, 1, d.train[0]) == std::vector<std::int64_t>{2});
}

TEST_CASE("a perfect model scores recall and ndcg of one") {
  // Items embed as +1 for the user's test items and -1 otherwise.
  InteractionDataset d;
  d.num_users = 1;
  d.num_items = 10;
  d.train = {{0, 1}};
  d.test = {{4, 7}};
  EmbeddingTable e = random_table(1, 10, 1, 16);
  e.user_rows(0, 0) = 1.0;
  for (std::int64_t i = 0; i < 10; ++i) e.item_rows(i, 0) = -1.0;
  e.item_rows(4, 0) = 1.0;
  e.item_rows(7, 0) = 1.0;
  const ModelParams p = passthrough_params(1);
  const EvalReport rep = evaluate(p, e, d, 2);
  CHECK(rep.recall == 1.0);
  CHECK(rep.ndcg == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("metrics are invariant under a monotone score transform") {
  // Doubling every item embedding doubles all passthrough scores but keeps
  // the ranking, so both metrics are unchanged.
  Rng rng(17);
  InteractionDataset d;
  d.num_users = 6;
  d.num_items = 20;
  d.train.resize(6);
  d.test.resize(6);
  for (std::int64_t u = 0; u < 6; ++u) {
    for (std::int64_t i = 0; i < 20; ++i) {
      const double r = rng.uniform();
      if (r < 0.25) d.train[u].push_back(i);
      else if (r < 0.4) d.test[u].push_back(i);
    }
    if (d.test[u].empty())
      for (std::int64_t i = 0; i < 20; ++i)
        if (!std::binary_search(d.train[u].begin(), d.train[u].end(), i)) {
          d.test[u].push_back(i);
          break;
        }
  }
  d.validate();
  EmbeddingTable e = random_table(6, 20, 4, 18);
  const ModelParams p = passthrough_params(4);
  const EvalReport before = evaluate(p, e, d, 5);
  for (double& v : e.item_rows.data) v *= 2.0;
  const EvalReport after = evaluate(p, e, d, 5);
  CHECK(before.recall == after.recall);
  CHECK(before.ndcg == after.ndcg);
}

TEST_CASE("test_only candidates saturate the metrics") {
  Rng rng(19);
  InteractionDataset d;
  d.num_users = 5;
  d.num_items = 15;
  d.train.resize(5);
  d.test.resize(5);
  for (std::int64_t u = 0; u < 5; ++u) {
    for (std::int64_t i = 0; i < 15; ++i) {
      const double r = rng.uniform();
      if (r < 0.3) d.train[u].push_back(i);
      else if (r < 0.45) d.test[u].push_back(i);
    }
    if (d.test[u].empty())
      for (std::int64_t i = 0; i < 15; ++i)
        if (!std::binary_search(d.train[u].begin(), d.train[u].end(), i)) {
          d.test[u].push_back(i);
          break;
        }
  }
  d.validate();
  const EmbeddingTable e = random_table(5, 15, 3, 20);
  const ModelParams p = random_params(3, 2, 21);
  // k at least the largest test list: every candidate is relevant, so both
  // metrics hit 1 regardless of the model.
  const EvalReport rep = evaluate(p, e, d, 15, CandidateSet::test_only);
  CHECK(rep.recall == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.ndcg == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("evaluate rejects invalid k") {
  const EmbeddingTable e = random_table(1, 3, 2, 22);
  const ModelParams p = passthrough_params(2);
  InteractionDataset d;
  d.num_users = 1;
  d.num_items = 3;
  d.train = {{0}};
  d.test = {{1}};
  CHECK_THROWS(evaluate(p, e, d, 0));
}
