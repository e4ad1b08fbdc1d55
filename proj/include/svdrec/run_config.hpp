#pragma once

#include <filesystem>
#include <string>

#include "svdrec/embedding.hpp"
#include "svdrec/trainer.hpp"

namespace svdrec {

// Everything a pipeline run needs, read from a flat key=value file and then
// optionally overridden by command-line flags.
struct RunConfig {
  std::string train_file;
  std::string test_file;
  EmbeddingMethod method = EmbeddingMethod::tsa;
  std::int64_t svd_dim = 512;  // embedding size; split across the two hops for tsa
  std::int64_t hidden = 512;
  std::int64_t batch_size = 1024;
  double learning_rate = 1e-3;
  double l2_reg = 1e-4;
  std::int64_t epochs = 400;
  std::uint64_t seed = 0;
  std::int64_t eval_every = 10;
  std::int64_t k = 20;
  std::string out_dir = "runs/default";
  bool use_cache = true;
  std::int64_t oversampling = 10;
  std::int64_t power_iters = 7;
  double drop_tol = 0.0;

  TrainConfig train_config() const;
};

std::string method_name(EmbeddingMethod m);
EmbeddingMethod parse_method(const std::string& name);  // accepts "ssb" / "tsa"

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
// Unknown keys and malformed values are errors with file:line positions.
RunConfig parse_config_file(const std::filesystem::path& path);

// Applies one key=value assignment to cfg; shared by the file parser and any
// caller that wants to override single fields.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Cross-field invariants: positive dims, even svd_dim for tsa, and so on.
void validate_config(const RunConfig& cfg);

}  // namespace svdrec
