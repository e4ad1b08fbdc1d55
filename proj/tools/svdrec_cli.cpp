#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "svdrec/commands.hpp"
#include "svdrec/run_config.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<std::string> train_file;
  std::optional<std::string> test_file;
  std::optional<std::string> method;
  std::optional<std::string> out_dir;
  std::optional<std::int64_t> svd_dim;
  std::optional<std::int64_t> hidden;
  std::optional<std::int64_t> batch_size;
  std::optional<std::int64_t> epochs;
  std::optional<std::int64_t> eval_every;
  std::optional<std::int64_t> k;
  std::optional<std::int64_t> oversampling;
  std::optional<std::int64_t> power_iters;
  std::optional<double> learning_rate;
  std::optional<double> l2_reg;
  std::optional<double> drop_tol;
  std::optional<std::uint64_t> seed;
  bool no_cache = false;
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "key=value config file, flags override it");
  cmd->add_option("--train-file", o.train_file, "training interactions (user then items per line)");
  cmd->add_option("--test-file", o.test_file, "held-out interactions, same format");
  cmd->add_option("--method", o.method, "embedding method")
      ->check(CLI::IsMember({"ssb", "tsa"}));
  cmd->add_option("--svd-dim", o.svd_dim, "embedding size (split across hops for tsa)");
  cmd->add_option("--hidden", o.hidden, "perceptron hidden width");
  cmd->add_option("--batch-size", o.batch_size, "training batch size");
  cmd->add_option("--learning-rate", o.learning_rate, "Adam learning rate");
  cmd->add_option("--l2-reg", o.l2_reg, "l2 coefficient on perceptron weights");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--seed", o.seed, "root RNG seed");
  cmd->add_option("--eval-every", o.eval_every, "epochs between evaluations (0 disables)");
  cmd->add_option("--k", o.k, "evaluation cutoff");
  cmd->add_option("--out-dir", o.out_dir, "artifact directory");
  cmd->add_option("--oversampling", o.oversampling, "extra sketch columns for the SVD");
  cmd->add_option("--power-iters", o.power_iters, "subspace iteration rounds for the SVD");
  cmd->add_option("--drop-tol", o.drop_tol, "magnitude cutoff when squaring the adjacency");
  cmd->add_flag("--no-cache", o.no_cache, "recompute even when cached artifacts match");
}

svdrec::RunConfig make_config(const CliOptions& o) {
  svdrec::RunConfig cfg;
  if (!o.config_path.empty()) cfg = svdrec::parse_config_file(o.config_path);
  if (o.train_file) cfg.train_file = *o.train_file;
  if (o.test_file) cfg.test_file = *o.test_file;
  if (o.method) cfg.method = svdrec::parse_method(*o.method);
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.svd_dim) cfg.svd_dim = *o.svd_dim;
  if (o.hidden) cfg.hidden = *o.hidden;
  if (o.batch_size) cfg.batch_size = *o.batch_size;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.eval_every) cfg.eval_every = *o.eval_every;
  if (o.k) cfg.k = *o.k;
  if (o.oversampling) cfg.oversampling = *o.oversampling;
  if (o.power_iters) cfg.power_iters = *o.power_iters;
  if (o.learning_rate) cfg.learning_rate = *o.learning_rate;
  if (o.l2_reg) cfg.l2_reg = *o.l2_reg;
  if (o.drop_tol) cfg.drop_tol = *o.drop_tol;
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_cache) cfg.use_cache = false;
  svdrec::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SVD-based collaborative filtering pipeline"};
  app.require_subcommand(1);
  CliOptions opts;

  CLI::App* prepare = app.add_subcommand("prepare", "parse the dataset, cache graph matrices");
  CLI::App* embed = app.add_subcommand("embed", "factorize the cached matrices into embeddings");
  CLI::App* train = app.add_subcommand("train", "fit the ranking perceptron on the embeddings");
  CLI::App* eval = app.add_subcommand("eval", "score the checkpoint on the held-out split");
  CLI::App* run = app.add_subcommand("run", "prepare, embed, train, and eval in one go");
  for (CLI::App* cmd : {prepare, embed, train, eval, run}) add_common_options(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    svdrec::RunConfig cfg = make_config(opts);
    if (prepare->parsed()) svdrec::cmd_prepare(cfg);
    if (embed->parsed()) svdrec::cmd_embed(cfg);
    if (train->parsed()) svdrec::cmd_train(cfg);
    if (eval->parsed()) svdrec::cmd_eval(cfg);
    if (run->parsed()) svdrec::cmd_run(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
