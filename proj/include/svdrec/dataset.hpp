#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace svdrec {

// Per-user train/test item sets for an implicit-feedback split.
struct InteractionDataset {
  std::int64_t num_users = 0;
  std::int64_t num_items = 0;
  std::vector<std::vector<std::int64_t>> train;  // sorted, deduplicated
  std::vector<std::vector<std::int64_t>> test;

  std::int64_t train_interactions() const;
  std::int64_t test_interactions() const;

  // Throws std::runtime_error on any violated invariant (ids in range,
  // sorted/deduplicated lists, train and test disjoint per user).
  void validate() const;
};

// One parsed interaction file: users in file order with their sorted item
// lists, plus the largest ids seen.
struct ParsedInteractions {
  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> users;
  std::int64_t max_user_id = -1;
  std::int64_t max_item_id = -1;
};

// Reads the plain-text interaction format: one line per user, whitespace
// separated decimal ids, the first being the user id. Item lists are
// deduplicated and sorted. A user with no items is kept. Malformed tokens and
// repeated user lines raise errors naming the line number.
ParsedInteractions parse_interaction_file(const std::string& path);

InteractionDataset load_dataset(const std::string& train_path, const std::string& test_path);

}  // namespace svdrec
