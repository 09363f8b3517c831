#include <gtest/gtest.h>

#include <set>

#include "promptfold/dataset.hpp"
#include "promptfold/errors.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

TEST(Dataset, ShippedDemoDataset) {
  auto records = load_dataset(data_path("demo/dataset.jsonl"));
  ASSERT_EQ(records.size(), 20u);
  EXPECT_EQ(records[0].id, "q01");
  EXPECT_EQ(records[0].type, "obj");
  for (const auto& r : records) {
    EXPECT_TRUE(r.type.has_value());
  }
}

TEST(Dataset, OptionalTypeAndBlankLines) {
  auto records = parse_dataset(
      "{\"id\": \"a\", \"question\": \"Q?\", \"scene\": \"s\", \"answer\": \"x\"}\n\n"
      "{\"id\": \"b\", \"question\": \"R?\", \"scene\": \"s\", \"answer\": \"y\", \"type\": \"rel\"}\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_FALSE(records[0].type.has_value());
  EXPECT_EQ(records[1].type, "rel");
}

TEST(Dataset, Rejections) {
  EXPECT_THROW(parse_dataset("{\"id\": \"a\"}\n"), ConfigError);
  EXPECT_THROW(parse_dataset("{\"id\": \"a\", \"question\": \" \", \"scene\": \"s\", \"answer\": \"x\"}\n"), ConfigError);
  EXPECT_THROW(parse_dataset("{\"id\": \"a\", \"question\": \"Q\", \"scene\": \"s\", \"answer\": \"x\"}\n"
                             "{\"id\": \"a\", \"question\": \"R\", \"scene\": \"s\", \"answer\": \"y\"}\n"),
               ConfigError);
  EXPECT_THROW(parse_dataset("[1, 2]\n"), ConfigError);
  EXPECT_THROW(load_dataset("/missing.jsonl"), ConfigError);
}

TEST(Subsample, SeededSubsetKeepsOrder) {
  auto records = load_dataset(data_path("demo/dataset.jsonl"));
  auto a = subsample(records, 7, 42);
  auto b = subsample(records, 7, 42);
  ASSERT_EQ(a.size(), 7u);
  EXPECT_EQ(a, b);
  std::set<std::string> ids;
  std::size_t last = 0;
  for (const auto& r : a) {
    ids.insert(r.id);
    std::size_t pos = static_cast<std::size_t>(std::stoi(r.id.substr(1)));
    EXPECT_GT(pos, last);
    last = pos;
  }
  EXPECT_EQ(ids.size(), 7u);
  EXPECT_NE(subsample(records, 7, 43), a);
  EXPECT_EQ(subsample(records, 50, 1), records);
}
