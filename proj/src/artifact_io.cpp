#include "svdrec/artifact_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace svdrec {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
constexpr char kMagic[6] = {'S', 'V', 'D', 'R', 'E', 'C'};

std::uint64_t fnv_update(std::uint64_t h, const unsigned char* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

void pack_u64(unsigned char* b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t unpack_u64(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

class ByteWriter {
 public:
  explicit ByteWriter(const std::filesystem::path& path)
      : final_path_(path), tmp_path_(path.string() + ".tmp"), out_(tmp_path_, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + tmp_path_.string());
  }

  void bytes(const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    hash_ = fnv_update(hash_, b, n);
    out_.write(reinterpret_cast<const char*>(b), static_cast<std::streamsize>(n));
  }

  void u16(std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    bytes(b, 2);
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void i64(std::int64_t v) {
    unsigned char b[8];
    pack_u64(b, static_cast<std::uint64_t>(v));
    bytes(b, 8);
  }
  void f64(double v) {
    unsigned char b[8];
    pack_u64(b, std::bit_cast<std::uint64_t>(v));
    bytes(b, 8);
  }
  void i64s(std::span<const std::int64_t> vs) {
    pack_chunked(vs.data(), vs.size(),
                 [](unsigned char* b, std::int64_t v) { pack_u64(b, static_cast<std::uint64_t>(v)); });
  }
  void f64s(std::span<const double> vs) {
    pack_chunked(vs.data(), vs.size(),
                 [](unsigned char* b, double v) { pack_u64(b, std::bit_cast<std::uint64_t>(v)); });
  }

  void finish() {
    unsigned char b[8];
    pack_u64(b, hash_);
    out_.write(reinterpret_cast<const char*>(b), 8);
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + tmp_path_.string());
    out_.close();
    std::filesystem::rename(tmp_path_, final_path_);
  }

 private:
  template <typename T, typename Pack>
  void pack_chunked(const T* data, std::size_t n, Pack pack) {
    constexpr std::size_t kChunk = 8192;
    std::vector<unsigned char> buf(kChunk * 8);
    std::size_t done = 0;
    while (done < n) {
      std::size_t len = std::min(kChunk, n - done);
      for (std::size_t i = 0; i < len; ++i) pack(buf.data() + i * 8, data[done + i]);
      bytes(buf.data(), len * 8);
      done += len;
    }
  }

  std::filesystem::path final_path_;
  std::filesystem::path tmp_path_;
  std::ofstream out_;
  std::uint64_t hash_ = kFnvOffset;
};

class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open artifact: " + path_);
    std::streamsize size = in.tellg();
    if (size < 20) throw std::runtime_error("artifact too small: " + path_);
    buf_.resize(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(buf_.data()), size);
    if (!in) throw std::runtime_error("read failed: " + path_);

    std::size_t body = buf_.size() - 8;
    std::uint64_t want = unpack_u64(buf_.data() + body);
    std::uint64_t got = fnv_update(kFnvOffset, buf_.data(), body);
    if (want != got) throw std::runtime_error("artifact checksum mismatch: " + path_);
    end_ = body;
  }

  ArtifactKind header() {
    char magic[6];
    raw(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0) {
      throw std::runtime_error("bad artifact magic: " + path_);
    }
    std::uint16_t version = u16();
    if (version != kArtifactVersion) {
      throw std::runtime_error("unsupported artifact version " + std::to_string(version) + ": " +
                               path_);
    }
    return static_cast<ArtifactKind>(u32());
  }

  std::uint16_t u16() {
    unsigned char b[2];
    raw(b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    unsigned char b[4];
    raw(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::int64_t i64() {
    unsigned char b[8];
    raw(b, 8);
    return static_cast<std::int64_t>(unpack_u64(b));
  }
  double f64() {
    unsigned char b[8];
    raw(b, 8);
    return std::bit_cast<double>(unpack_u64(b));
  }
  std::vector<std::int64_t> i64s(std::size_t n) {
    std::vector<std::int64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i64();
    return out;
  }
  std::vector<double> f64s(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f64();
    return out;
  }

  std::int64_t checked_count(std::int64_t n, const char* what) const {
    if (n < 0) throw std::runtime_error(std::string("negative ") + what + ": " + path_);
    return n;
  }

  void expect_end() const {
    if (pos_ != end_) throw std::runtime_error("trailing bytes in artifact: " + path_);
  }

  const std::string& path() const { return path_; }

 private:
  void raw(void* dst, std::size_t n) {
    if (end_ - pos_ < n) throw std::runtime_error("truncated artifact: " + path_);
    std::memcpy(dst, buf_.data() + pos_, n);
    pos_ += n;
  }

  std::string path_;
  std::vector<unsigned char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

void write_header(ByteWriter& w, ArtifactKind kind) {
  w.bytes(kMagic, 6);
  w.u16(kArtifactVersion);
  w.u32(static_cast<std::uint32_t>(kind));
}

void expect_kind(ByteReader& r, ArtifactKind want) {
  ArtifactKind got = r.header();
  if (got != want) {
    throw std::runtime_error("artifact kind " + std::to_string(static_cast<std::uint32_t>(got)) +
                             ", expected " + std::to_string(static_cast<std::uint32_t>(want)) +
                             ": " + r.path());
  }
}

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  return fnv_update(kFnvOffset, bytes.data(), bytes.size());
}

ArtifactKind peek_artifact_kind(const std::filesystem::path& path) {
  ByteReader r(path);
  return r.header();
}

void write_sparse_artifact(const std::filesystem::path& path, const SparseMatrix& m) {
  ByteWriter w(path);
  write_header(w, ArtifactKind::sparse_matrix);
  w.i64(m.rows);
  w.i64(m.cols);
  w.i64(m.nnz());
  w.i64s(m.row_ptr);
  w.i64s(m.col_idx);
  w.f64s(m.values);
  w.finish();
}

SparseMatrix read_sparse_artifact(const std::filesystem::path& path) {
  ByteReader r(path);
  expect_kind(r, ArtifactKind::sparse_matrix);
  SparseMatrix m;
  m.rows = r.checked_count(r.i64(), "row count");
  m.cols = r.checked_count(r.i64(), "col count");
  std::int64_t nnz = r.checked_count(r.i64(), "nnz");
  m.row_ptr = r.i64s(static_cast<std::size_t>(m.rows) + 1);
  m.col_idx = r.i64s(static_cast<std::size_t>(nnz));
  m.values = r.f64s(static_cast<std::size_t>(nnz));
  r.expect_end();
  m.validate();
  return m;
}

void write_embedding_artifact(const std::filesystem::path& path, const EmbeddingTable& e) {
  ByteWriter w(path);
  write_header(w, ArtifactKind::embedding_table);
  w.i64(e.num_users);
  w.i64(e.num_items);
  w.i64(e.dim);
  w.u32(static_cast<std::uint32_t>(e.method_tag));
  w.f64s(e.user_rows.data);
  w.f64s(e.item_rows.data);
  w.finish();
}

EmbeddingTable read_embedding_artifact(const std::filesystem::path& path) {
  ByteReader r(path);
  expect_kind(r, ArtifactKind::embedding_table);
  EmbeddingTable e;
  e.num_users = r.checked_count(r.i64(), "user count");
  e.num_items = r.checked_count(r.i64(), "item count");
  e.dim = r.checked_count(r.i64(), "dimension");
  std::uint32_t tag = r.u32();
  if (tag > 1) throw std::runtime_error("unknown embedding method tag: " + path.string());
  e.method_tag = static_cast<EmbeddingMethod>(tag);
  e.user_rows = DenseMatrix(e.num_users, e.dim,
                            r.f64s(static_cast<std::size_t>(e.num_users * e.dim)));
  e.item_rows = DenseMatrix(e.num_items, e.dim,
                            r.f64s(static_cast<std::size_t>(e.num_items * e.dim)));
  r.expect_end();
  return e;
}

void write_checkpoint_artifact(const std::filesystem::path& path, const ModelParams& p) {
  ByteWriter w(path);
  write_header(w, ArtifactKind::model_checkpoint);
  w.i64(p.input_dim);
  w.i64(p.hidden);
  w.f64s(p.w1.data);
  w.f64s(p.b1);
  w.f64s(p.w2.data);
  w.f64s(p.b2);
  w.finish();
}

ModelParams read_checkpoint_artifact(const std::filesystem::path& path) {
  ByteReader r(path);
  expect_kind(r, ArtifactKind::model_checkpoint);
  ModelParams p;
  p.input_dim = r.checked_count(r.i64(), "input dimension");
  p.hidden = r.checked_count(r.i64(), "hidden width");
  p.w1 = DenseMatrix(p.input_dim, p.hidden,
                     r.f64s(static_cast<std::size_t>(p.input_dim * p.hidden)));
  p.b1 = r.f64s(static_cast<std::size_t>(p.hidden));
  p.w2 = DenseMatrix(p.hidden, p.hidden, r.f64s(static_cast<std::size_t>(p.hidden * p.hidden)));
  p.b2 = r.f64s(static_cast<std::size_t>(p.hidden));
  r.expect_end();
  return p;
}

void write_report_artifact(const std::filesystem::path& path, const EvalReport& rep) {
  ByteWriter w(path);
  write_header(w, ArtifactKind::eval_report);
  w.i64(rep.k);
  w.f64(rep.recall);
  w.f64(rep.ndcg);
  w.i64(rep.users_evaluated);
  w.finish();
}

EvalReport read_report_artifact(const std::filesystem::path& path) {
  ByteReader r(path);
  expect_kind(r, ArtifactKind::eval_report);
  EvalReport rep;
  rep.k = r.i64();
  rep.recall = r.f64();
  rep.ndcg = r.f64();
  rep.users_evaluated = r.i64();
  r.expect_end();
  return rep;
}

}  // namespace svdrec
