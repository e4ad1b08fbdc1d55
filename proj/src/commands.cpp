#include "svdrec/commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "svdrec/artifact_io.hpp"
#include "svdrec/dataset.hpp"
#include "svdrec/evaluator.hpp"
#include "svdrec/graph.hpp"
#include "svdrec/rng.hpp"
#include "svdrec/trainer.hpp"
#include "svdrec/tsvd.hpp"

namespace svdrec {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Exclusive marker file so two processes cannot write one output directory.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) {
        throw std::runtime_error("output directory is locked (" + path_.string() +
                                 " exists; remove it if the previous run died)");
      }
      throw std::runtime_error("cannot create lock file " + path_.string() + ": " +
                               std::strerror(errno));
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    ssize_t n = ::write(fd_, pid.data(), pid.size());
    (void)n;
  }
  ~DirLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

class StageTimer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string run_tag(const RunConfig& cfg) {
  return method_name(cfg.method) + "_d" + std::to_string(cfg.svd_dim);
}

fs::path adjacency_path(const RunConfig& c) { return fs::path(c.out_dir) / "adjacency.bin"; }
fs::path norm_path(const RunConfig& c) { return fs::path(c.out_dir) / "norm_adjacency.bin"; }
fs::path norm_sq_path(const RunConfig& c) { return fs::path(c.out_dir) / "norm_adjacency_sq.bin"; }
fs::path prepare_meta_path(const RunConfig& c) { return fs::path(c.out_dir) / "prepare_meta.json"; }
fs::path embedding_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("embedding_" + run_tag(c) + ".bin");
}
fs::path embed_meta_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("embedding_" + run_tag(c) + ".meta.json");
}
fs::path embed_log_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("embed_" + run_tag(c) + ".jsonl");
}
fs::path checkpoint_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("model_" + run_tag(c) + ".bin");
}
fs::path train_log_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("train_" + run_tag(c) + ".jsonl");
}
fs::path report_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("report_" + run_tag(c) + ".bin");
}
fs::path eval_log_path(const RunConfig& c) {
  return fs::path(c.out_dir) / ("eval_" + run_tag(c) + ".jsonl");
}

std::uint64_t file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(buf.data()), size);
  if (!in) throw std::runtime_error("cannot read input file: " + path);
  return fnv1a64(buf);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  return json::parse(in);
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write: " + path.string());
}

json prepare_inputs_meta(const RunConfig& cfg) {
  json j;
  j["train_fnv"] = file_fingerprint(cfg.train_file);
  j["test_fnv"] = file_fingerprint(cfg.test_file);
  j["drop_tol"] = cfg.drop_tol;
  return j;
}

bool meta_subset_matches(const json& have, const json& want) {
  for (auto it = want.begin(); it != want.end(); ++it) {
    if (!have.contains(it.key()) || have.at(it.key()) != it.value()) return false;
  }
  return true;
}

void require_prepared(const RunConfig& cfg) {
  if (!fs::exists(prepare_meta_path(cfg)) || !fs::exists(adjacency_path(cfg)) ||
      !fs::exists(norm_path(cfg)) || !fs::exists(norm_sq_path(cfg))) {
    throw std::runtime_error("missing cache: run `prepare` for " + cfg.out_dir + " first");
  }
}

// Published results at K=20 on the three common benchmark splits, shown next
// to a finished evaluation for context.
struct ReferenceRow {
  const char* method;
  double vals[6];  // gowalla r/n, yelp2018 r/n, amazon-book r/n
};

constexpr ReferenceRow kReferenceRows[] = {
    {"MF", {0.1291, 0.1109, 0.0433, 0.0354, 0.0250, 0.0196}},
    {"NeuMF", {0.1399, 0.1212, 0.0451, 0.0363, 0.0258, 0.0200}},
    {"NGCF", {0.1570, 0.1327, 0.0579, 0.0477, 0.0344, 0.0263}},
    {"Mult-VAE", {0.1641, 0.1335, 0.0584, 0.0450, 0.0407, 0.0315}},
    {"GRMF", {0.1477, 0.1205, 0.0571, 0.0462, 0.0354, 0.0270}},
    {"LightGCN", {0.1830, 0.1554, 0.0649, 0.0530, 0.0411, 0.0315}},
    {"SSB", {0.1690, 0.1401, 0.0647, 0.0534, 0.0408, 0.0325}},
    {"TSA", {0.1704, 0.1415, 0.0657, 0.0542, 0.0456, 0.0364}},
};

void print_reference_table(const RunConfig& cfg, const EvalReport& rep) {
  std::printf("\nreference results at K=20 (published numbers):\n");
  std::printf("  %-10s %-16s %-16s %-16s\n", "", "Gowalla", "Yelp2018", "Amazon-Book");
  std::printf("  %-10s %-7s %-8s %-7s %-8s %-7s %-8s\n", "method", "Recall", "NDCG", "Recall",
              "NDCG", "Recall", "NDCG");
  for (const ReferenceRow& row : kReferenceRows) {
    std::printf("  %-10s %-7.4f %-8.4f %-7.4f %-8.4f %-7.4f %-8.4f\n", row.method, row.vals[0],
                row.vals[1], row.vals[2], row.vals[3], row.vals[4], row.vals[5]);
  }
  std::printf("  this run (%s, k=%lld): recall=%.4f ndcg=%.4f\n", method_name(cfg.method).c_str(),
              static_cast<long long>(rep.k), rep.recall, rep.ndcg);
}

}  // namespace

void cmd_prepare(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.train_file.empty() || cfg.test_file.empty()) {
    throw std::runtime_error("prepare needs train_file and test_file");
  }
  fs::create_directories(cfg.out_dir);
  DirLock lock(cfg.out_dir);
  StageTimer timer;

  json inputs = prepare_inputs_meta(cfg);
  if (cfg.use_cache && fs::exists(prepare_meta_path(cfg)) && fs::exists(adjacency_path(cfg)) &&
      fs::exists(norm_path(cfg)) && fs::exists(norm_sq_path(cfg))) {
    json meta = read_json_file(prepare_meta_path(cfg));
    if (meta_subset_matches(meta, inputs)) {
      std::printf("[prepare] cache hit: artifacts in %s are up to date\n", cfg.out_dir.c_str());
      return;
    }
  }

  InteractionDataset d = load_dataset(cfg.train_file, cfg.test_file);
  std::printf("[prepare] %lld nodes (%lld users + %lld items), %lld train interactions\n",
              static_cast<long long>(d.num_users + d.num_items),
              static_cast<long long>(d.num_users), static_cast<long long>(d.num_items),
              static_cast<long long>(d.train_interactions()));

  SparseMatrix a = build_adjacency(d);
  SparseMatrix a_norm = laplacian_normalize(symmetrize(a));
  SparseMatrix a_norm_sq = matrix_power2(a_norm, cfg.drop_tol);
  std::printf("[prepare] adjacency nnz=%lld, normalized nnz=%lld, squared nnz=%lld\n",
              static_cast<long long>(a.nnz()), static_cast<long long>(a_norm.nnz()),
              static_cast<long long>(a_norm_sq.nnz()));

  write_sparse_artifact(adjacency_path(cfg), a);
  write_sparse_artifact(norm_path(cfg), a_norm);
  write_sparse_artifact(norm_sq_path(cfg), a_norm_sq);

  json meta = inputs;
  meta["num_users"] = d.num_users;
  meta["num_items"] = d.num_items;
  meta["train_nnz"] = d.train_interactions();
  write_json_file(prepare_meta_path(cfg), meta);
  std::printf("[prepare] wrote 3 artifacts to %s in %.2fs\n", cfg.out_dir.c_str(),
              timer.seconds());
}

void cmd_embed(const RunConfig& cfg) {
  validate_config(cfg);
  fs::create_directories(cfg.out_dir);
  DirLock lock(cfg.out_dir);
  require_prepared(cfg);
  json prep_meta = read_json_file(prepare_meta_path(cfg));

  json want;
  want["method"] = method_name(cfg.method);
  want["svd_dim"] = cfg.svd_dim;
  want["seed"] = cfg.seed;
  want["oversampling"] = cfg.oversampling;
  want["power_iters"] = cfg.power_iters;
  want["train_fnv"] = prep_meta.at("train_fnv");
  want["test_fnv"] = prep_meta.at("test_fnv");
  want["drop_tol"] = prep_meta.at("drop_tol");
  if (cfg.use_cache && fs::exists(embed_meta_path(cfg)) && fs::exists(embedding_path(cfg))) {
    json meta = read_json_file(embed_meta_path(cfg));
    if (meta_subset_matches(meta, want)) {
      std::printf("[embed] cache hit: %s is up to date\n", embedding_path(cfg).c_str());
      return;
    }
  }

  std::int64_t num_users = prep_meta.at("num_users").get<std::int64_t>();
  std::int64_t num_items = prep_meta.at("num_items").get<std::int64_t>();
  SparseMatrix a_norm = read_sparse_artifact(norm_path(cfg));
  if (a_norm.rows != num_users + num_items) {
    throw std::runtime_error("prepared artifacts disagree with their metadata");
  }

  Rng root(cfg.seed);
  std::uint64_t hop1_seed = root.next();
  std::uint64_t hop2_seed = root.next();

  StageTimer svd_timer;
  EmbeddingTable table;
  if (cfg.method == EmbeddingMethod::ssb) {
    std::printf("[embed] method=ssb svd_dim=%lld\n", static_cast<long long>(cfg.svd_dim));
    TsvdParams p{cfg.svd_dim, cfg.oversampling, cfg.power_iters, hop1_seed};
    TsvdResult f = truncated_svd(a_norm, p);
    table = ssb_embeddings(f, num_users, num_items);
  } else {
    std::int64_t per_hop = cfg.svd_dim / 2;
    std::printf("[embed] method=tsa svd_dim=%lld (per-hop k=%lld)\n",
                static_cast<long long>(cfg.svd_dim), static_cast<long long>(per_hop));
    SparseMatrix a_norm_sq = read_sparse_artifact(norm_sq_path(cfg));
    TsvdParams p1{per_hop, cfg.oversampling, cfg.power_iters, hop1_seed};
    TsvdParams p2{per_hop, cfg.oversampling, cfg.power_iters, hop2_seed};
    TsvdResult f1 = truncated_svd(a_norm, p1);
    TsvdResult f2 = truncated_svd(a_norm_sq, p2);
    table = tsa_embeddings(f1, f2, num_users, num_items);
  }
  double svd_seconds = svd_timer.seconds();
  std::printf("[embed] svd time: %.3fs\n", svd_seconds);
  std::printf("[embed] table dims %lldx%lld users, %lldx%lld items\n",
              static_cast<long long>(table.num_users), static_cast<long long>(table.dim),
              static_cast<long long>(table.num_items), static_cast<long long>(table.dim));

  write_embedding_artifact(embedding_path(cfg), table);
  write_json_file(embed_meta_path(cfg), want);

  json record;
  record["method"] = method_name(cfg.method);
  record["svd_dim"] = cfg.svd_dim;
  record["seed"] = cfg.seed;
  record["svd_seconds"] = svd_seconds;
  std::ofstream log(embed_log_path(cfg));
  log << record.dump() << '\n';
}

void cmd_train(const RunConfig& cfg) {
  validate_config(cfg);
  fs::create_directories(cfg.out_dir);
  DirLock lock(cfg.out_dir);
  if (!fs::exists(embedding_path(cfg))) {
    throw std::runtime_error("missing cache: run `embed` for " + cfg.out_dir + " first");
  }
  EmbeddingTable table = read_embedding_artifact(embedding_path(cfg));
  if (table.method_tag != cfg.method) {
    throw std::runtime_error("embedding artifact was built with a different method");
  }
  InteractionDataset d = load_dataset(cfg.train_file, cfg.test_file);

  std::ofstream log(train_log_path(cfg));
  if (!log) throw std::runtime_error("cannot write: " + train_log_path(cfg).string());
  StageTimer timer;
  auto on_epoch = [&](const EpochRecord& rec) {
    json j;
    j["epoch"] = rec.epoch;
    j["loss"] = rec.loss;
    if (rec.has_eval) {
      j["recall"] = rec.recall;
      j["ndcg"] = rec.ndcg;
    }
    log << j.dump() << '\n';
    log.flush();
    if (rec.has_eval) {
      std::printf("[train] epoch %lld/%lld loss=%.6f recall@%lld=%.6f ndcg@%lld=%.6f\n",
                  static_cast<long long>(rec.epoch), static_cast<long long>(cfg.epochs), rec.loss,
                  static_cast<long long>(cfg.k), rec.recall, static_cast<long long>(cfg.k),
                  rec.ndcg);
    }
  };

  FitResult res = fit(d, table, cfg.train_config(), on_epoch);
  write_checkpoint_artifact(checkpoint_path(cfg), res.params);
  if (res.log.empty()) {
    std::printf("[train] epochs=0, checkpoint equals initialization\n");
  } else {
    std::printf("[train] best epoch %lld recall@%lld=%.6f\n",
                static_cast<long long>(res.best_epoch), static_cast<long long>(cfg.k),
                res.best_recall);
  }
  std::printf("[train] finished %lld epochs in %.2fs, checkpoint %s\n",
              static_cast<long long>(cfg.epochs), timer.seconds(),
              checkpoint_path(cfg).c_str());
}

void cmd_eval(const RunConfig& cfg) {
  validate_config(cfg);
  fs::create_directories(cfg.out_dir);
  DirLock lock(cfg.out_dir);
  if (!fs::exists(embedding_path(cfg))) {
    throw std::runtime_error("missing cache: run `embed` for " + cfg.out_dir + " first");
  }
  if (!fs::exists(checkpoint_path(cfg))) {
    throw std::runtime_error("missing cache: run `train` for " + cfg.out_dir + " first");
  }
  EmbeddingTable table = read_embedding_artifact(embedding_path(cfg));
  ModelParams params = read_checkpoint_artifact(checkpoint_path(cfg));
  InteractionDataset d = load_dataset(cfg.train_file, cfg.test_file);

  EvalReport rep = evaluate(params, table, d, cfg.k);
  write_report_artifact(report_path(cfg), rep);

  json record;
  record["method"] = method_name(cfg.method);
  record["svd_dim"] = cfg.svd_dim;
  record["seed"] = cfg.seed;
  record["k"] = rep.k;
  record["recall"] = rep.recall;
  record["ndcg"] = rep.ndcg;
  record["users_evaluated"] = rep.users_evaluated;
  std::ofstream log(eval_log_path(cfg));
  log << record.dump() << '\n';

  std::printf("[eval] method=%s svd_dim=%lld seed=%llu\n", method_name(cfg.method).c_str(),
              static_cast<long long>(cfg.svd_dim), static_cast<unsigned long long>(cfg.seed));
  std::printf("[eval] recall@%lld=%.6f ndcg@%lld=%.6f (%lld users)\n",
              static_cast<long long>(rep.k), rep.recall, static_cast<long long>(rep.k), rep.ndcg,
              static_cast<long long>(rep.users_evaluated));
  print_reference_table(cfg, rep);
}

void cmd_run(const RunConfig& cfg) {
  cmd_prepare(cfg);
  cmd_embed(cfg);
  cmd_train(cfg);
  cmd_eval(cfg);
}

}  // namespace svdrec
