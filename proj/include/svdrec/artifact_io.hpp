#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "svdrec/embedding.hpp"
#include "svdrec/evaluator.hpp"
#include "svdrec/model.hpp"
#include "svdrec/sparse_matrix.hpp"

namespace svdrec {

// On-disk container: 6-byte magic "SVDREC", u16 format version, u32 payload
// kind, kind-specific payload, then a u64 FNV-1a checksum of every preceding
// byte. All integers and doubles are little-endian; doubles are IEEE-754
// bit patterns. Files are written to a temp name and renamed into place.
enum class ArtifactKind : std::uint32_t {
  sparse_matrix = 1,
  embedding_table = 2,
  model_checkpoint = 3,
  eval_report = 4,
};

inline constexpr std::uint16_t kArtifactVersion = 1;

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

// Reads just the header; throws if the magic or version is wrong.
ArtifactKind peek_artifact_kind(const std::filesystem::path& path);

void write_sparse_artifact(const std::filesystem::path& path, const SparseMatrix& m);
SparseMatrix read_sparse_artifact(const std::filesystem::path& path);

void write_embedding_artifact(const std::filesystem::path& path, const EmbeddingTable& e);
EmbeddingTable read_embedding_artifact(const std::filesystem::path& path);

void write_checkpoint_artifact(const std::filesystem::path& path, const ModelParams& p);
ModelParams read_checkpoint_artifact(const std::filesystem::path& path);

void write_report_artifact(const std::filesystem::path& path, const EvalReport& r);
EvalReport read_report_artifact(const std::filesystem::path& path);

}  // namespace svdrec
