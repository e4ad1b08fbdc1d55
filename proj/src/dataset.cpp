#include "svdrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace svdrec {

std::int64_t InteractionDataset::train_interactions() const {
  std::int64_t n = 0;
  for (const auto& items : train) n += static_cast<std::int64_t>(items.size());
  return n;
}

std::int64_t InteractionDataset::test_interactions() const {
  std::int64_t n = 0;
  for (const auto& items : test) n += static_cast<std::int64_t>(items.size());
  return n;
}

void InteractionDataset::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::runtime_error("InteractionDataset: " + what);
  };
  if (static_cast<std::int64_t>(train.size()) != num_users ||
      static_cast<std::int64_t>(test.size()) != num_users)
    fail("per-user list count does not match num_users");
  for (std::int64_t u = 0; u < num_users; ++u) {
    for (const auto* lists : {&train, &test}) {
      const auto& items = (*lists)[u];
      for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k] < 0 || items[k] >= num_items) fail("item id out of range");
        if (k > 0 && items[k] <= items[k - 1]) fail("item list not sorted/deduplicated");
      }
    }
    // Disjointness: both lists are sorted.
    std::size_t a = 0, b = 0;
    while (a < train[u].size() && b < test[u].size()) {
      if (train[u][a] == test[u][b])
        fail("train/test overlap for user " + std::to_string(u));
      if (train[u][a] < test[u][b])
        ++a;
      else
        ++b;
    }
  }
}

namespace {

std::int64_t parse_id(const char* begin, const char* end, const std::string& path,
                      std::int64_t line_no) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 0)
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed id token '" +
                             std::string(begin, end) + "'");
  return value;
}

}  // namespace

ParsedInteractions parse_interaction_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open interaction file: " + path);

  ParsedInteractions out;
  std::unordered_set<std::int64_t> seen_users;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // Whitespace-split the line.
    std::vector<std::int64_t> ids;
    const char* p = line.data();
    const char* line_end = line.data() + line.size();
    while (p < line_end) {
      while (p < line_end && (*p == ' ' || *p == '\t')) ++p;
      const char* tok = p;
      while (p < line_end && *p != ' ' && *p != '\t') ++p;
      if (p > tok) ids.push_back(parse_id(tok, p, path, line_no));
    }
    if (ids.empty()) continue;

    const std::int64_t user = ids.front();
    if (!seen_users.insert(user).second)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": user " +
                               std::to_string(user) + " appears twice");
    std::vector<std::int64_t> items(ids.begin() + 1, ids.end());
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());

    out.max_user_id = std::max(out.max_user_id, user);
    if (!items.empty()) out.max_item_id = std::max(out.max_item_id, items.back());
    out.users.emplace_back(user, std::move(items));
  }
  return out;
}

InteractionDataset load_dataset(const std::string& train_path, const std::string& test_path) {
  const ParsedInteractions tr = parse_interaction_file(train_path);
  const ParsedInteractions te = parse_interaction_file(test_path);

  InteractionDataset d;
  d.num_users = std::max(tr.max_user_id, te.max_user_id) + 1;
  d.num_items = std::max(tr.max_item_id, te.max_item_id) + 1;
  d.train.resize(d.num_users);
  d.test.resize(d.num_users);
  for (auto& [user, items] : tr.users) d.train[user] = items;
  for (auto& [user, items] : te.users) d.test[user] = items;
  d.validate();
  return d;
}

}  // namespace svdrec
