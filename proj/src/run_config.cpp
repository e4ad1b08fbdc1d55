#include "svdrec/run_config.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace svdrec {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& value, const char* key) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument(std::string(key) + ": cannot parse number '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, const char* key) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument(std::string(key) + ": cannot parse boolean '" + value + "'");
}

}  // namespace

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.batch_size = batch_size;
  t.learning_rate = learning_rate;
  t.l2_reg = l2_reg;
  t.epochs = epochs;
  t.seed = seed;
  t.hidden = hidden;
  t.eval_every = eval_every;
  t.eval_k = k;
  return t;
}

std::string method_name(EmbeddingMethod m) {
  return m == EmbeddingMethod::ssb ? "ssb" : "tsa";
}

EmbeddingMethod parse_method(const std::string& name) {
  if (name == "ssb") return EmbeddingMethod::ssb;
  if (name == "tsa") return EmbeddingMethod::tsa;
  throw std::invalid_argument("unknown method '" + name + "' (expected ssb or tsa)");
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "train_file") {
    cfg.train_file = value;
  } else if (key == "test_file") {
    cfg.test_file = value;
  } else if (key == "method") {
    cfg.method = parse_method(value);
  } else if (key == "svd_dim") {
    cfg.svd_dim = parse_number<std::int64_t>(value, "svd_dim");
  } else if (key == "hidden") {
    cfg.hidden = parse_number<std::int64_t>(value, "hidden");
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<std::int64_t>(value, "batch_size");
  } else if (key == "learning_rate") {
    cfg.learning_rate = parse_number<double>(value, "learning_rate");
  } else if (key == "l2_reg") {
    cfg.l2_reg = parse_number<double>(value, "l2_reg");
  } else if (key == "epochs") {
    cfg.epochs = parse_number<std::int64_t>(value, "epochs");
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(value, "seed");
  } else if (key == "eval_every") {
    cfg.eval_every = parse_number<std::int64_t>(value, "eval_every");
  } else if (key == "k") {
    cfg.k = parse_number<std::int64_t>(value, "k");
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "use_cache") {
    cfg.use_cache = parse_bool(value, "use_cache");
  } else if (key == "oversampling") {
    cfg.oversampling = parse_number<std::int64_t>(value, "oversampling");
  } else if (key == "power_iters") {
    cfg.power_iters = parse_number<std::int64_t>(value, "power_iters");
  } else if (key == "drop_tol") {
    cfg.drop_tol = parse_number<double>(value, "drop_tol");
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  RunConfig cfg;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected key=value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": empty key");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const std::exception& ex) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.train_file.empty()) throw std::invalid_argument("train_file must be set");
  if (cfg.test_file.empty()) throw std::invalid_argument("test_file must be set");
  if (cfg.svd_dim < 1) throw std::invalid_argument("svd_dim must be positive");
  if (cfg.method == EmbeddingMethod::tsa && cfg.svd_dim % 2 != 0) {
    throw std::invalid_argument("tsa splits svd_dim across two hops; it must be even");
  }
  if (cfg.hidden < 1) throw std::invalid_argument("hidden must be positive");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (cfg.l2_reg < 0.0) throw std::invalid_argument("l2_reg must be non-negative");
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (cfg.eval_every < 0) throw std::invalid_argument("eval_every must be non-negative");
  if (cfg.k < 1) throw std::invalid_argument("k must be positive");
  if (cfg.oversampling < 0) throw std::invalid_argument("oversampling must be non-negative");
  if (cfg.power_iters < 0) throw std::invalid_argument("power_iters must be non-negative");
  if (cfg.drop_tol < 0.0) throw std::invalid_argument("drop_tol must be non-negative");
  if (cfg.out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
}

}  // namespace svdrec
