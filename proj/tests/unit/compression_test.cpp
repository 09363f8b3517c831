#include <gtest/gtest.h>

#include <cstdlib>

#include "promptfold/compression.hpp"
#include "promptfold/errors.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

namespace {

InstructionTemplates tiny_templates() {
  InstructionTemplates t;
  t.rewrite = "REWRITE the definitions.";
  t.write_snippets = "WRITE snippets.";
  t.specialize = "Specialize for: {type_definition}";
  t.classification = "{type[i]}: {type_definition[i]}\n";
  t.version = "t1";
  return t;
}

PrepromptSource tiny_source() {
  PrepromptSource s;
  s.api_definitions = ApiDefinitionIndex::parse(
      "def find(name):\n    \"\"\"Long docstring about finding.\"\"\"\n    pass\n\n"
      "def exists(name):\n    \"\"\"Long docstring about existence.\"\"\"\n    pass\n");
  s.snippets = make_bundle({{"o-1", "find('x')"}}, s.api_definitions);
  s.coding_instruction = "Write execute_command.";
  return s;
}

const char* kGoodDefs = "```python\ndef find(name): pass\ndef exists(name): pass\n```";

std::string snippet_reply(const std::string& tag) {
  return "```python\n# q1 " + tag + "\ndef execute_command(image):\n    return find('a')\n\n"
         "# q2\ndef execute_command(image):\n    return exists('b')\n```";
}

}  // namespace

TEST(ExtractCodeBlock, LargestFenceWins) {
  EXPECT_EQ(extract_code_block("a\n```\nx\n```\nb\n```py\nlonger\nblock\n```\n"), "longer\nblock\n");
  EXPECT_EQ(extract_code_block("no fences"), "no fences");
  EXPECT_EQ(extract_code_block("```\nunterminated"), "```\nunterminated");
  EXPECT_EQ(extract_code_block("```\n```"), "");
}

// Split points hand marked in four_snippets.md: the fourth header has no
// blank line before it, so it continues the third snippet.
TEST(SplitSnippets, ParagraphRule) {
  auto parts = split_snippets(extract_code_block(read_file(test_data_path("four_snippets.md"))));
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0].rfind("# Is there a foo?\n", 0), 0u);
  EXPECT_EQ(parts[1].rfind("# What color is the foo?\n", 0), 0u);
  EXPECT_NE(parts[1].find("[0]\n\n    return foo_patch"), std::string::npos);
  EXPECT_EQ(parts[2].rfind("# Is the foo left of the bar?\n", 0), 0u);
  EXPECT_NE(parts[2].find("# Which foo is closest?"), std::string::npos);
  for (const auto& p : parts) {
    EXPECT_NE(p.back(), '\n');
  }
}

TEST(SplitSnippets, PreambleJoinsFirstSnippetAndNoDefsMeansEmpty) {
  auto parts = split_snippets("import os\n\ndef a():\n    pass\n\n\n\ndef b():\n    pass\n");
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0], "import os\n\ndef a():\n    pass");
  EXPECT_EQ(parts[1], "def b():\n    pass");
  EXPECT_TRUE(split_snippets("x = 1\n\ny = 2").empty());
  EXPECT_EQ(split_snippets("async def a():\n    pass").size(), 1u);
}

TEST(CompressDefinitions, RetriesWithRejectionThenAccepts) {
  int calls = 0;
  ScriptedBackend backend([&](const LlmRequest&) {
    return ++calls == 1 ? std::string("```python\ndef find(name): pass\n```") : std::string(kGoodDefs);
  });
  CompressionOptions opts;
  opts.required_names = {"find", "exists"};
  auto out = compress_api_definitions(tiny_source(), tiny_templates(), backend, opts);
  EXPECT_EQ(out.attempts, 2);
  EXPECT_EQ(out.text, "def find(name): pass\ndef exists(name): pass\n");
  auto reqs = backend.requests();
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0].tag, "compress_defs");
  EXPECT_NE(reqs[0].prompt.find("REWRITE the definitions."), std::string::npos);
  EXPECT_NE(reqs[0].prompt.find("# find('x')"), std::string::npos);
  EXPECT_NE(reqs[1].prompt.find("exists"), std::string::npos);
  EXPECT_NE(reqs[1].prompt.find("rejected"), std::string::npos);
}

TEST(CompressDefinitions, ExhaustedAttemptsThrow) {
  ScriptedBackend backend([](const LlmRequest&) { return std::string("no code here"); });
  CompressionOptions opts;
  opts.max_attempts = 2;
  EXPECT_THROW(compress_api_definitions(tiny_source(), tiny_templates(), backend, opts), CompressionRejected);
  EXPECT_EQ(backend.requests().size(), 2u);
}

TEST(CompressDefinitions, DefaultRequiredNamesAreIntersectedWithSource) {
  ScriptedBackend backend([](const LlmRequest&) { return std::string(kGoodDefs); });
  auto out = compress_api_definitions(tiny_source(), tiny_templates(), backend);
  EXPECT_EQ(out.attempts, 1);
}

TEST(CompressSnippets, IdsAnchorsAndTag) {
  auto src = tiny_source();
  auto defs = ApiDefinitionIndex::parse("def find(name): pass\ndef exists(name): pass\n");
  ScriptedBackend backend([](const LlmRequest& r) { return snippet_reply(r.tag); });
  auto bundle = compress_code_snippets(src, tiny_templates(), std::string("Object questions."), "obj", defs, backend);
  ASSERT_EQ(bundle.size(), 2u);
  EXPECT_EQ(bundle.snippets[0].id, "obj-1");
  EXPECT_EQ(bundle.snippets[1].id, "obj-2");
  EXPECT_EQ(bundle.snippets[0].anchors, (std::vector<std::string>{"find"}));
  EXPECT_EQ(bundle.snippets[1].anchors, (std::vector<std::string>{"exists"}));
  auto reqs = backend.requests();
  EXPECT_EQ(reqs[0].tag, "compress_snippets:obj");
  EXPECT_NE(reqs[0].prompt.find("Specialize for: Object questions."), std::string::npos);

  ScriptedBackend empty([](const LlmRequest&) { return std::string("```\nx = 1\n```"); });
  EXPECT_THROW(compress_code_snippets(src, tiny_templates(), std::nullopt, "g", defs, empty), CompressionRejected);
}

TEST(BuildCompressedSet, OneBundlePerTypePlusGeneric) {
  QuestionTypeCatalog cat({{"obj", "Object questions."}, {"attr", "Attribute questions."}});
  ScriptedBackend backend([](const LlmRequest& r) {
    return r.tag == "compress_defs" ? std::string(kGoodDefs) : snippet_reply(r.tag);
  });
  WhitespaceTokenizer tok;
  CompressionOptions opts;
  opts.timestamp = "2024-01-01T00:00:00Z";
  auto set = build_compressed_set(tiny_source(), cat, tiny_templates(), backend, tok, opts);
  EXPECT_EQ(set.per_type.size(), 2u);
  ASSERT_TRUE(set.generic.has_value());
  EXPECT_EQ(backend.count_tag("compress_defs"), 1u);
  EXPECT_EQ(backend.count_tag("compress_snippets:"), 3u);
  EXPECT_EQ(set.provenance.created_at, "2024-01-01T00:00:00Z");
  EXPECT_EQ(set.provenance.template_version, "t1");
  EXPECT_EQ(set.provenance.tokenizer, "whitespace");
  EXPECT_EQ(set.provenance.backend_id, "scripted");
  EXPECT_EQ(set.provenance.token_counts.at("api_defs"), tok.count(set.api_defs.source_text()));
  EXPECT_EQ(set.provenance.token_counts.at("snippets:obj"), bundle_tokens(tok, set.bundle("obj")));
  EXPECT_TRUE(set.provenance.token_counts.count("snippets:generic"));
  EXPECT_TRUE(set.provenance.token_counts.count("classification"));
  EXPECT_THROW(set.bundle("rel"), UnknownType);
}

TEST(BuildCompressedSet, OneFailingTypeFailsTheWholeSet) {
  QuestionTypeCatalog cat({{"obj", "Object questions."}, {"attr", "Attribute questions."}});
  ScriptedBackend backend([](const LlmRequest& r) {
    if (r.tag == "compress_snippets:attr") {
      throw BackendUnreachable("down");
    }
    return r.tag == "compress_defs" ? std::string(kGoodDefs) : snippet_reply(r.tag);
  });
  WhitespaceTokenizer tok;
  EXPECT_THROW(build_compressed_set(tiny_source(), cat, tiny_templates(), backend, tok), BackendUnreachable);
}

TEST(DefaultTimestamp, SourceDateEpoch) {
  ::setenv("SOURCE_DATE_EPOCH", "1717200000", 1);
  EXPECT_EQ(default_timestamp(), "2024-06-01T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_EQ(default_timestamp().size(), 20u);
}
