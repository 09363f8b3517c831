#include <gtest/gtest.h>

#include <json.hpp>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "promptfold/prompt_set.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

namespace {

CompressedPromptSet sample_set() {
  CompressedPromptSet set;
  set.api_defs = ApiDefinitionIndex::parse("def find(name):\n    pass\n\ndef exists(name):\n    pass\n");
  set.per_type["obj"] = make_bundle({{"obj-1", "find('a')"}, {"obj-2", "exists('b')"}}, set.api_defs);
  set.per_type["attr"] = make_bundle({{"attr-1", "x = find('a')\n\nreturn x"}}, set.api_defs);
  set.generic = make_bundle({{"generic-1", "exists('c')"}}, set.api_defs);
  set.provenance.backend_id = "replay";
  set.provenance.created_at = "2024-06-01T00:00:00Z";
  set.provenance.template_version = "t1";
  set.provenance.tokenizer = "whitespace";
  set.provenance.token_counts = {{"api_defs", 14}, {"snippets:obj", 9}};
  set.provenance.warnings = {"identical output"};
  return set;
}

}  // namespace

TEST(PromptSet, RoundTripIsLossless) {
  auto set = sample_set();
  std::string text = serialize_set(set);
  EXPECT_EQ(deserialize_set(text), set);
  EXPECT_EQ(serialize_set(deserialize_set(text)), text);
  EXPECT_EQ(text.back(), '\n');
}

TEST(PromptSet, ChecksumCoversTheDocument) {
  auto doc = nlohmann::ordered_json::parse(serialize_set(sample_set()));
  std::string checksum = doc["checksum"];
  doc.erase("checksum");
  EXPECT_EQ(checksum, sha256_hex(doc.dump(2)));
}

TEST(PromptSet, CorruptionIsDetected) {
  std::string text = serialize_set(sample_set());
  std::string tampered = text;
  tampered.replace(tampered.find("find('a')"), 9, "find('z')");
  EXPECT_THROW(deserialize_set(tampered), CorruptCache);
  EXPECT_THROW(deserialize_set(text.substr(0, text.size() / 2)), CorruptCache);
  EXPECT_THROW(deserialize_set("[]"), CorruptCache);

  auto doc = nlohmann::ordered_json::parse(text);
  doc["version"] = 2;
  EXPECT_THROW(deserialize_set(doc.dump(2)), CorruptCache);
}

TEST(PromptSet, TokenizerMismatchIsFlagged) {
  std::string text = serialize_set(sample_set());
  EXPECT_FALSE(deserialize_set(text, std::string("whitespace")).tokenizer_mismatch);
  EXPECT_TRUE(deserialize_set(text, std::string("bpe:cl100k_base")).tokenizer_mismatch);
}

TEST(PromptSet, SaveAndLoad) {
  TempDir dir;
  auto set = sample_set();
  save_set(set, dir.file("set.json"));
  EXPECT_FALSE(std::filesystem::exists(dir.file("set.json.tmp")));
  EXPECT_EQ(load_set(dir.file("set.json")), set);
  EXPECT_THROW(load_set(dir.file("missing.json")), CorruptCache);
}

TEST(PromptSet, ShippedDemoSetLoads) {
  auto set = load_set(data_path("demo/compressed_set.json"), std::string("bpe:cl100k_base"));
  EXPECT_FALSE(set.tokenizer_mismatch);
  EXPECT_EQ(set.per_type.size(), 5u);
  EXPECT_TRUE(set.generic.has_value());
  EXPECT_EQ(set.provenance.token_counts.at("api_defs"), 521u);
  auto tok = cl100k();
  EXPECT_EQ(tok->count(set.api_defs.source_text()), 521u);
  // Per-type bundle sizes frozen from tiktoken (freeze_goldens.py).
  std::map<std::string, std::size_t> expected{{"obj", 203}, {"cat", 270}, {"attr", 235}, {"rel", 270}, {"global", 204}};
  for (const auto& [type, tokens] : expected) {
    EXPECT_EQ(bundle_tokens(*tok, set.bundle(type)), tokens) << type;
  }
  EXPECT_EQ(bundle_tokens(*tok, *set.generic), 126u);
}
