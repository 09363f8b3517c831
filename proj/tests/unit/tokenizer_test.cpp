#include <gtest/gtest.h>

#include "promptfold/compression.hpp"
#include "promptfold/errors.hpp"
#include "promptfold/tokenizer.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

namespace {

std::vector<std::string> pieces(std::string_view text) {
  std::vector<std::string> out;
  for (auto p : BpeTokenizer::split(text)) {
    out.emplace_back(p);
  }
  return out;
}

}  // namespace

// Counts frozen from tiktoken (tests/oracles/freeze_goldens.py).
TEST(BpeTokenizer, CountsMatchReferenceEncoder) {
  auto tok = cl100k();
  EXPECT_EQ(tok->id(), "bpe:cl100k_base");
  EXPECT_EQ(tok->count(read_file(data_path("preprompt/api_definitions.py"))), 1999u);
  EXPECT_EQ(tok->count(read_file(data_path("preprompt/instruction.txt"))), 82u);
  EXPECT_EQ(tok->count(read_file(test_data_path("lorem.txt"))), 1424u);
  EXPECT_EQ(tok->count(extract_code_block(read_file(data_path("demo/responses/compressed_defs.md")))), 521u);
  EXPECT_EQ(tok->count(""), 0u);
}

TEST(BpeTokenizer, EncodeAgreesWithCount) {
  auto tok = BpeTokenizer::load(data_path("tokenizers/cl100k_base.tiktoken"));
  std::string text = "def execute_command(image) -> str:\n    return 'yes'\n";
  EXPECT_EQ(tok->encode(text).size(), tok->count(text));
  EXPECT_EQ(tok->vocabulary_size(), 100256u);
}

TEST(BpeTokenizer, SplitMatchesReferencePattern) {
  using V = std::vector<std::string>;
  EXPECT_EQ(pieces("Hello world"), (V{"Hello", " world"}));
  EXPECT_EQ(pieces("  indented\n\n\tcode()"), (V{" ", " indented", "\n\n", "\tcode", "()"}));
  EXPECT_EQ(pieces("I'm 12345 tokens!!"), (V{"I", "'m", " ", "123", "45", " tokens", "!!"}));
  EXPECT_EQ(pieces("x = f(a, b)  \n"), (V{"x", " =", " f", "(a", ",", " b", ")", "  \n"}));
  EXPECT_EQ(pieces("don't WE'LL they've"), (V{"don", "'t", " WE", "'LL", " they", "'ve"}));
  EXPECT_EQ(pieces("\r\n\r\n  end"), (V{"\r\n\r\n", " ", " end"}));
}

TEST(BpeTokenizer, SplitIsLossless) {
  std::string text = read_file(test_data_path("three_defs.py"));
  std::string joined;
  for (auto p : BpeTokenizer::split(text)) {
    joined += p;
  }
  EXPECT_EQ(joined, text);
}

TEST(BpeTokenizer, MissingOrMalformedRankFile) {
  EXPECT_THROW(BpeTokenizer::load("/nonexistent/ranks.tiktoken"), TokenizerUnavailable);
  TempDir dir;
  write_file(dir.file("bad.tiktoken"), "not base64 at all\n");
  EXPECT_THROW(BpeTokenizer::load(dir.file("bad.tiktoken")), TokenizerUnavailable);
}

TEST(WhitespaceTokenizer, WordsAndSymbols) {
  WhitespaceTokenizer tok;
  EXPECT_EQ(tok.count("foo(bar, 12)"), 6u);
  EXPECT_EQ(tok.count("   \n\t"), 0u);
  EXPECT_EQ(tok.count("snake_case_name"), 1u);
  EXPECT_EQ(tok.id(), "whitespace");
}

TEST(TokenizerSpec, ParseAndRoundTrip) {
  auto ws = TokenizerSpec::parse("whitespace");
  EXPECT_EQ(ws.kind, "whitespace");
  auto bpe = TokenizerSpec::parse("bpe:/tmp/x.tiktoken");
  EXPECT_EQ(bpe.kind, "bpe");
  EXPECT_EQ(bpe.path, "/tmp/x.tiktoken");
  EXPECT_EQ(bpe.to_string(), "bpe:/tmp/x.tiktoken");
  EXPECT_THROW(TokenizerSpec::parse("sentencepiece"), ConfigError);
  EXPECT_EQ(make_tokenizer(ws)->id(), "whitespace");
}
