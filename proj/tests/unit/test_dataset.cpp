#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "svdrec/dataset.hpp"

using namespace svdrec;
namespace fs = std::filesystem;

namespace {

// Writes `content` to a fresh file in a per-process temp dir and returns its path.
class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("svdrec_dataset_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++) + ".txt");
    std::ofstream out(path_);
    out << content;
  }
  ~TempFile() { std::error_code ec; fs::remove(path_, ec); }
  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("parses one user per line with the leading user id") {
  TempFile f("0 10 11\n1 3\n");
  const ParsedInteractions p = parse_interaction_file(f.path());
  REQUIRE(p.users.size() == 2);
  CHECK(p.users[0].first == 0);
  CHECK(p.users[0].second == std::vector<std::int64_t>{10, 11});
  CHECK(p.users[1].second == std::vector<std::int64_t>{3});
  CHECK(p.max_user_id == 1);
  CHECK(p.max_item_id == 11);
}

TEST_CASE("a bare user id is a user with no items") {
  TempFile f("3\n");
  const ParsedInteractions p = parse_interaction_file(f.path());
  REQUIRE(p.users.size() == 1);
  CHECK(p.users[0].first == 3);
  CHECK(p.users[0].second.empty());
  CHECK(p.max_item_id == -1);
}

TEST_CASE("item lists are deduplicated and sorted") {
  TempFile f("0 5 2 5 2 9\n");
  const ParsedInteractions p = parse_interaction_file(f.path());
  CHECK(p.users[0].second == std::vector<std::int64_t>{2, 5, 9});
}

TEST_CASE("blank lines and crlf endings are tolerated") {
  TempFile f("0 1\r\n\n1 2\r\n\n");
  const ParsedInteractions p = parse_interaction_file(f.path());
  REQUIRE(p.users.size() == 2);
  CHECK(p.users[1].second == std::vector<std::int64_t>{2});
}

TEST_CASE("a repeated user line is an error naming the line") {
  TempFile f("0 1\n0 2\n");
  CHECK_THROWS_WITH_AS(parse_interaction_file(f.path()),
                       doctest::Contains(":2:"), std::runtime_error);
}

TEST_CASE("malformed tokens are errors naming the line") {
  TempFile f("0 1\n1 x2\n");
  CHECK_THROWS_WITH_AS(parse_interaction_file(f.path()),
                       doctest::Contains(":2:"), std::runtime_error);
  TempFile neg("0 -4\n");
  CHECK_THROWS(parse_interaction_file(neg.path()));
}

TEST_CASE("missing file is an error") {
  CHECK_THROWS(parse_interaction_file("/nonexistent/svdrec_no_such_file.txt"));
}

TEST_CASE("load_dataset sizes from the largest ids across both files") {
  TempFile train("0 0 1\n2 3\n");
  TempFile test("0 2\n2 5\n");
  const InteractionDataset d = load_dataset(train.path(), test.path());
  CHECK(d.num_users == 3);  // user 1 never appears but ids run 0..2
  CHECK(d.num_items == 6);  // item 5 only appears in test
  CHECK(d.train[0] == std::vector<std::int64_t>{0, 1});
  CHECK(d.train[1].empty());
  CHECK(d.test[2] == std::vector<std::int64_t>{5});
  CHECK(d.train_interactions() == 3);
  CHECK(d.test_interactions() == 2);
}

TEST_CASE("load_dataset rejects train/test overlap for a user") {
  TempFile train("0 1 2\n");
  TempFile test("0 2\n");
  CHECK_THROWS(load_dataset(train.path(), test.path()));
}

TEST_CASE("validate rejects out-of-range and unsorted lists") {
  InteractionDataset d;
  d.num_users = 1;
  d.num_items = 3;
  d.train = {{0, 1}};
  d.test = {{2}};
  CHECK_NOTHROW(d.validate());

  InteractionDataset bad_range = d;
  bad_range.test = {{3}};
  CHECK_THROWS(bad_range.validate());

  InteractionDataset unsorted = d;
  unsorted.train = {{1, 0}};
  CHECK_THROWS(unsorted.validate());

  InteractionDataset dup = d;
  dup.train = {{0, 0}};
  CHECK_THROWS(dup.validate());

  InteractionDataset wrong_len = d;
  wrong_len.test.clear();
  CHECK_THROWS(wrong_len.validate());
}

TEST_CASE("the checked-in toy split loads cleanly") {
  const std::string dir = SVDREC_TEST_DATA_DIR;
  const InteractionDataset d = load_dataset(dir + "/toy_train.txt", dir + "/toy_test.txt");
  CHECK(d.num_users == 60);
  CHECK(d.num_items == 60);
  CHECK(d.train_interactions() == 60 * 20);
  CHECK(d.test_interactions() == 60 * 5);
}
