#include <gtest/gtest.h>

#include "promptfold/aggregate.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

namespace {

struct Fixture {
  ApiDefinitionIndex defs = ApiDefinitionIndex::parse(read_file(test_data_path("three_defs.py")));
  SnippetBundle bundle = make_bundle({{"s-scale", "box = scale(b, 2)\nprint(box)"},
                                      {"s-size", "# ask size\nb.size()"},
                                      {"s-area", "area(1, 2)\n\narea(3, 4)"},
                                      {"s-none", "print('no api')"}},
                                     defs);
};

}  // namespace

TEST(Aggregate, MatchesSpliceOracle) {
  Fixture f;
  std::string got = aggregate(f.defs, "Use the helpers above.", f.bundle);
  EXPECT_EQ(got, read_file(test_data_path("three_defs_aggregated.expected")));
}

TEST(Aggregate, LayoutRecordsEveryInsertion) {
  Fixture f;
  auto layout = aggregate_with_layout(f.defs, "Use the helpers above.", f.bundle);
  std::map<std::string, std::string> anchor_of;
  for (const auto& ins : layout.insertions) {
    if (!ins.snippet_id.empty()) {
      EXPECT_FALSE(anchor_of.count(ins.snippet_id)) << "inserted twice: " << ins.snippet_id;
      anchor_of[ins.snippet_id] = ins.anchor;
    }
  }
  EXPECT_EQ(anchor_of, (std::map<std::string, std::string>{
                           {"s-scale", "scale"}, {"s-size", "size"}, {"s-area", "area"}, {"s-none", ""}}));
  EXPECT_EQ(strip_insertions(layout), f.defs.source_text());
  EXPECT_EQ(layout.text.substr(layout.text.size() - 22), "Use the helpers above.");
}

TEST(Aggregate, EmptyBundleIsDefinitionsThenInstruction) {
  auto defs = ApiDefinitionIndex::parse("def f():\n    pass");
  EXPECT_EQ(aggregate(defs, "go", {}), "def f():\n    pass\n\ngo");
  auto defs2 = ApiDefinitionIndex::parse("def f():\n    pass\n");
  EXPECT_EQ(aggregate(defs2, "go", {}), "def f():\n    pass\n\ngo");
}

TEST(Aggregate, UnterminatedLastBlockGetsNewlineBeforeInsertion) {
  auto defs = ApiDefinitionIndex::parse("def f():\n    pass");
  auto bundle = make_bundle({{"a", "f()"}}, defs);
  auto layout = aggregate_with_layout(defs, "go", bundle);
  EXPECT_EQ(layout.text, "def f():\n    pass\n# f()\n\ngo");
  EXPECT_EQ(strip_insertions(layout), defs.source_text());
}

TEST(RenderCommentBlock, IndentPrefixAndBlankLines) {
  EXPECT_EQ(render_comment_block("a\n\nb", "  ", "#"), "  # a\n  #\n  # b\n");
  EXPECT_EQ(render_comment_block("x\r", "", "//"), "// x\n");
}

TEST(ConcatPrompt, ExactlyOneLineBreak) {
  EXPECT_EQ(concat_prompt("head", "tail"), "head\ntail");
  EXPECT_EQ(concat_prompt("head\n", "tail"), "head\ntail");
  EXPECT_EQ(concat_prompt("", "tail"), "tail");
}
