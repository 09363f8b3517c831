#pragma once

#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "promptfold/llm.hpp"
#include "promptfold/tokenizer.hpp"

namespace promptfold {

struct TranscriptEntry {
  enum class Matcher { exact_hash, substring };

  Matcher matcher = Matcher::exact_hash;
  /// SHA-256 hex of the exact prompt bytes (exact_hash entries).
  std::string hash;
  /// Every pattern must occur in the prompt (substring entries).
  std::vector<std::string> contains;
  std::string prompt_head;
  std::string response;
  /// Substring entries are consumed on first use unless this is set.
  bool repeat = false;
};

/// Recorded prompt→response pairs. One JSON object per line:
///   {"hash": hex, "prompt_head": str, "response": str}
/// Hand-written test transcripts may instead use
///   {"contains": [str, ...], "response": str, "repeat"?: bool}
class ReplayTranscript {
 public:
  /// Throws ConfigError on malformed lines or conflicting duplicate hashes.
  static ReplayTranscript parse(std::string_view jsonl);
  static ReplayTranscript load(const std::string& path);

  /// Identical duplicates of an exact-hash entry are dropped.
  void add(TranscriptEntry entry);

  const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<TranscriptEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_hash_;
};

/// First 120 code points of a prompt, for human inspection of transcripts.
std::string prompt_head(std::string_view prompt);

/// Serialized transcript line for an exact-hash entry (no trailing newline).
std::string transcript_line(std::string_view prompt, std::string_view response);

/// Deterministic offline backend answering from a transcript.
class ReplayBackend final : public LlmBackend {
 public:
  /// `context_window` of 0 disables the overflow check.
  ReplayBackend(ReplayTranscript transcript, std::shared_ptr<const Tokenizer> tokenizer,
                std::size_t context_window = 0, std::string id = "replay");

  LlmResponse complete(const LlmRequest& request) override;
  std::string id() const override { return id_; }

  std::size_t calls() const;

 private:
  ReplayTranscript transcript_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::size_t context_window_;
  std::string id_;
  std::unordered_map<std::string, std::size_t> exact_;
  std::vector<std::size_t> substring_;
  mutable std::mutex mu_;
  std::vector<bool> consumed_;
  std::size_t calls_ = 0;
};

/// Forwards to another backend and appends each new (prompt hash, response)
/// pair to a transcript file, so any run can be replayed offline later.
class RecordingBackend final : public LlmBackend {
 public:
  /// Opens `path` for appending; throws TranscriptWriteFailed on failure.
  RecordingBackend(std::shared_ptr<LlmBackend> inner, const std::string& path);

  LlmResponse complete(const LlmRequest& request) override;
  std::string id() const override { return inner_->id(); }

 private:
  std::shared_ptr<LlmBackend> inner_;
  std::string path_;
  std::mutex mu_;
  std::ofstream out_;
  std::set<std::string> written_;
};

}  // namespace promptfold
