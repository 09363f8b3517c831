#include <gtest/gtest.h>

#include "promptfold/catalog.hpp"
#include "promptfold/errors.hpp"
#include "promptfold/templates.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

TEST(Catalog, ShippedCatalog) {
  auto cat = QuestionTypeCatalog::load(data_path("catalogs/gqa.json"));
  EXPECT_EQ(cat.names(), (std::vector<std::string>{"obj", "cat", "attr", "rel", "global"}));
  EXPECT_TRUE(cat.contains("rel"));
  EXPECT_FALSE(cat.contains("REL"));
  EXPECT_THROW(cat.at("color"), UnknownType);
}

TEST(Catalog, Invariants) {
  EXPECT_THROW(QuestionTypeCatalog({}), ConfigError);
  EXPECT_THROW(QuestionTypeCatalog({{"a", "x"}, {"a", "y"}}), ConfigError);
  EXPECT_THROW(QuestionTypeCatalog(std::vector<QuestionType>{{"", "x"}}), ConfigError);
  EXPECT_THROW(QuestionTypeCatalog(std::vector<QuestionType>{{"a", ""}}), ConfigError);
  EXPECT_THROW(QuestionTypeCatalog::parse("{\"types\": {}}"), ConfigError);
  EXPECT_THROW(QuestionTypeCatalog::load("/missing.json"), ConfigError);
}

TEST(Templates, Placeholders) {
  EXPECT_EQ(find_placeholders("a {x} b {type[i]} {not valid} {y_2}"),
            (std::vector<std::string>{"{x}", "{type[i]}", "{y_2}"}));
}

TEST(Templates, ShippedTemplatesRender) {
  auto t = InstructionTemplates::load_dir(data_path("templates"));
  EXPECT_EQ(t.version, "reconstructed-v1");
  EXPECT_EQ(render_rewrite_instruction(t), t.rewrite);
  std::string inst = render_snippet_instruction(t, "Questions about colors.");
  EXPECT_EQ(inst.find("{type_definition}"), std::string::npos);
  EXPECT_NE(inst.find("Questions about colors."), std::string::npos);
  EXPECT_EQ(inst.rfind(t.write_snippets, 0), 0u);
  EXPECT_THROW(render_snippet_instruction(t, ""), InvalidArgument);
  EXPECT_EQ(render_generic_snippet_instruction(t), t.write_snippets);
}

// 147 frozen from tiktoken over the rendered prompt (freeze_goldens.py).
TEST(Templates, ClassificationPromptListsEveryTypeOnce) {
  auto t = InstructionTemplates::load_dir(data_path("templates"));
  auto cat = QuestionTypeCatalog::load(data_path("catalogs/gqa.json"));
  std::string prompt = render_classification_prompt(t, cat);
  std::size_t prev = 0;
  for (const auto& type : cat.types()) {
    std::string line = type.name + ": " + type.definition + "\n";
    auto at = prompt.find(line);
    ASSERT_NE(at, std::string::npos) << type.name;
    EXPECT_EQ(prompt.find(line, at + 1), std::string::npos);
    EXPECT_GT(at, prev);
    prev = at;
  }
  EXPECT_TRUE(find_placeholders(prompt).empty());
  EXPECT_EQ(cl100k()->count(prompt), 147u);
}

TEST(Templates, MissingFilesAndStrayPlaceholders) {
  TempDir dir;
  EXPECT_THROW(InstructionTemplates::load_dir(dir.path().string()), TemplateMissing);
  InstructionTemplates t;
  t.rewrite = "Rewrite {what}";
  EXPECT_THROW(render_rewrite_instruction(t), TemplateMissing);
  t.classification = "no per-type line";
  EXPECT_THROW(render_classification_prompt(t, QuestionTypeCatalog(std::vector<QuestionType>{{"a", "b"}})), TemplateMissing);
  t.classification = "{type[i]}: {type_definition[i]}\n{other}\n";
  EXPECT_THROW(render_classification_prompt(t, QuestionTypeCatalog(std::vector<QuestionType>{{"a", "b"}})), TemplateMissing);
}
