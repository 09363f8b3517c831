#include <gtest/gtest.h>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "promptfold/replay.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;

namespace {

LlmRequest req(std::string prompt, std::string tag = "t") {
  LlmRequest r;
  r.prompt = std::move(prompt);
  r.tag = std::move(tag);
  return r;
}

std::shared_ptr<const Tokenizer> ws() { return std::make_shared<WhitespaceTokenizer>(); }

}  // namespace

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Replay, ExactHashLookup) {
  auto t = ReplayTranscript::parse(transcript_line("hello", "world") + "\n" + transcript_line("a", "b") + "\n");
  ReplayBackend backend(t, ws());
  EXPECT_EQ(backend.complete(req("hello")).text, "world");
  EXPECT_EQ(backend.complete(req("hello")).text, "world");
  EXPECT_EQ(backend.complete(req("a")).text, "b");
  EXPECT_EQ(backend.calls(), 3u);
  EXPECT_THROW(backend.complete(req("hello ")), NoTranscriptMatch);
}

TEST(Replay, TranscriptLineShape) {
  std::string line = transcript_line("prompt text", "reply");
  EXPECT_EQ(line, "{\"hash\":\"" + sha256_hex("prompt text") +
                      "\",\"prompt_head\":\"prompt text\",\"response\":\"reply\"}");
  std::string long_prompt(300, 'x');
  long_prompt += "\xc3\xa9";
  EXPECT_EQ(prompt_head(long_prompt), std::string(120, 'x'));
  EXPECT_EQ(prompt_head("\xc3\xa9\xc3\xa9"), "\xc3\xa9\xc3\xa9");
}

TEST(Replay, SubstringEntriesAreConsumedInOrder) {
  auto t = ReplayTranscript::parse(
      "{\"contains\": [\"Classify\", \"cat\"], \"response\": \"obj\"}\n"
      "{\"contains\": [\"Classify\"], \"response\": \"first\"}\n"
      "{\"contains\": [\"Classify\"], \"response\": \"second\"}\n"
      "{\"contains\": [\"sticky\"], \"response\": \"again\", \"repeat\": true}\n");
  ReplayBackend backend(t, ws());
  EXPECT_EQ(backend.complete(req("Classify: dog")).text, "first");
  EXPECT_EQ(backend.complete(req("Classify: cat")).text, "obj");
  EXPECT_EQ(backend.complete(req("Classify: cat")).text, "second");
  EXPECT_THROW(backend.complete(req("Classify: cat")), NoTranscriptMatch);
  EXPECT_EQ(backend.complete(req("sticky")).text, "again");
  EXPECT_EQ(backend.complete(req("sticky")).text, "again");
}

TEST(Replay, ExactHashBeatsSubstring) {
  auto t = ReplayTranscript::parse("{\"contains\": [\"q\"], \"response\": \"sub\", \"repeat\": true}\n" +
                                   transcript_line("q1", "exact") + "\n");
  ReplayBackend backend(t, ws());
  EXPECT_EQ(backend.complete(req("q1")).text, "exact");
  EXPECT_EQ(backend.complete(req("q2")).text, "sub");
}

TEST(Replay, MissReportsHashAndTag) {
  ReplayBackend backend(ReplayTranscript{}, ws());
  try {
    backend.complete(req("unseen prompt", "classify"));
    FAIL() << "expected NoTranscriptMatch";
  } catch (const NoTranscriptMatch& e) {
    std::string what = e.what();
    EXPECT_NE(what.find(sha256_hex("unseen prompt")), std::string::npos);
    EXPECT_NE(what.find("classify"), std::string::npos);
    EXPECT_EQ(e.category(), ErrorCategory::backend);
  }
}

TEST(Replay, ContextOverflowBeforeMatching) {
  std::string big;
  for (int i = 0; i < 150; ++i) {
    big += "word ";
  }
  auto t = ReplayTranscript::parse(transcript_line(big, "ok") + "\n");
  EXPECT_THROW(ReplayBackend(t, cl100k(), 150).complete(req(big)), ContextOverflow);
  EXPECT_EQ(ReplayBackend(t, cl100k(), 151).complete(req(big)).text, "ok");
  EXPECT_EQ(ReplayBackend(t, cl100k(), 0).complete(req(big)).text, "ok");
}

TEST(Replay, MalformedTranscripts) {
  EXPECT_THROW(ReplayTranscript::parse("not json\n"), ConfigError);
  EXPECT_THROW(ReplayTranscript::parse("{\"hash\": \"abc\", \"response\": \"x\"}\n"), ConfigError);
  EXPECT_THROW(ReplayTranscript::parse("{\"contains\": [], \"response\": \"x\"}\n"), ConfigError);
  EXPECT_THROW(ReplayTranscript::parse("{\"contains\": [\"a\"]}\n"), ConfigError);
  EXPECT_THROW(ReplayTranscript::parse(transcript_line("p", "x") + "\n" + transcript_line("p", "y") + "\n"),
               ConfigError);
  auto dup = ReplayTranscript::parse(transcript_line("p", "x") + "\n\n" + transcript_line("p", "x") + "\n");
  EXPECT_EQ(dup.entries().size(), 1u);
  EXPECT_THROW(ReplayTranscript::load("/missing/transcript.jsonl"), ConfigError);
}

TEST(Recording, RecordedRunReplaysIdentically) {
  TempDir dir;
  auto live = std::make_shared<ScriptedBackend>([](const LlmRequest& r) { return "echo:" + r.prompt; });
  {
    RecordingBackend rec(live, dir.file("t.jsonl"));
    EXPECT_EQ(rec.complete(req("one")).text, "echo:one");
    EXPECT_EQ(rec.complete(req("two")).text, "echo:two");
    EXPECT_EQ(rec.complete(req("one")).text, "echo:one");
    EXPECT_EQ(rec.id(), "scripted");
  }
  std::string text = read_file(dir.file("t.jsonl"));
  EXPECT_EQ(text, transcript_line("one", "echo:one") + "\n" + transcript_line("two", "echo:two") + "\n");
  ReplayBackend replay(ReplayTranscript::load(dir.file("t.jsonl")), ws());
  EXPECT_EQ(replay.complete(req("two")).text, "echo:two");
  EXPECT_THROW(RecordingBackend(live, "/nonexistent-dir/t.jsonl"), TranscriptWriteFailed);
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorCategory::configuration), 1);
  EXPECT_EQ(exit_code_for(ErrorCategory::backend), 2);
  EXPECT_EQ(exit_code_for(ErrorCategory::validation), 3);
}
