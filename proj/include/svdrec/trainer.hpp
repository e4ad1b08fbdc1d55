#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "svdrec/dataset.hpp"
#include "svdrec/embedding.hpp"
#include "svdrec/model.hpp"
#include "svdrec/rng.hpp"

namespace svdrec {

struct TrainConfig {
  std::int64_t batch_size = 1024;
  double learning_rate = 1e-3;
  double l2_reg = 1e-4;  // applied to the perceptron weights only
  std::int64_t epochs = 400;
  std::uint64_t seed = 0;
  std::int64_t hidden = 512;
  std::int64_t eval_every = 10;  // epochs between test evaluations; 0 disables
  std::int64_t eval_k = 20;
};

struct AdamState {
  ModelGrads m;  // first moments
  ModelGrads v;  // second moments
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState init(std::int64_t input_dim, std::int64_t hidden);
};

struct Triple {
  std::int64_t user;
  std::int64_t pos;  // in train[user]
  std::int64_t neg;  // not in train[user]
};

// One triple per observed train interaction, with fresh uniform negatives
// (rejection sampled) and a full shuffle. Users with no train items
// contribute nothing; a user whose train list covers every item is an error.
std::vector<Triple> sample_epoch_triples(const InteractionDataset& d, Rng& rng);

struct BatchResult {
  double loss = 0.0;
  ModelGrads grads;
};

// Mean pairwise loss over the batch plus l2 * (||w1||^2 + ||w2||^2), with the
// matching gradients. Equivalent to averaging bpr_triple_gradients over the
// batch; computed with stacked matrix products.
BatchResult bpr_batch_loss(const ModelParams& p, std::span<const Triple> batch,
                           const EmbeddingTable& e, double l2);

// Standard Adam update with bias correction.
void adam_step(ModelParams& p, const ModelGrads& grads, AdamState& st, double lr);

struct EpochRecord {
  std::int64_t epoch = 0;
  double loss = 0.0;
  bool has_eval = false;
  double recall = 0.0;
  double ndcg = 0.0;
};

struct FitResult {
  ModelParams params;        // best evaluated checkpoint, or the final params
  ModelParams final_params;  // after the last epoch
  std::vector<EpochRecord> log;
  std::int64_t best_epoch = 0;
  double best_recall = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch pairwise training over the frozen embedding table. Deterministic
// for a fixed config: one seeded stream drives initialization and sampling.
// on_epoch, if set, fires after each epoch's record is complete.
FitResult fit(const InteractionDataset& d, const EmbeddingTable& e, const TrainConfig& cfg,
              const EpochCallback& on_epoch = {});

}  // namespace svdrec
