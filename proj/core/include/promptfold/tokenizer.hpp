#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptfold {

/// Counts tokens of a text. Implementations are immutable and thread-safe.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::size_t count(std::string_view text) const = 0;
  /// Stable identifier recorded in every report and compressed-set file.
  virtual std::string id() const = 0;
};

/// Byte-pair tokenizer over a tiktoken-format rank file (one
/// "<base64 bytes> <rank>" pair per line), with the GPT-4 family
/// pre-tokenization split. Letter/number classes are exact for ASCII and
/// approximate elsewhere.
class BpeTokenizer final : public Tokenizer {
 public:
  /// Throws TokenizerUnavailable when the file is missing or malformed.
  static std::shared_ptr<const BpeTokenizer> load(const std::string& path);

  std::vector<std::uint32_t> encode(std::string_view text) const;
  std::size_t count(std::string_view text) const override;
  std::string id() const override { return id_; }
  std::size_t vocabulary_size() const noexcept { return ranks_.size(); }

  /// Pre-tokenization pieces, exposed for testing.
  static std::vector<std::string_view> split(std::string_view text);

 private:
  BpeTokenizer() = default;
  void encode_piece(std::string_view piece, std::vector<std::uint32_t>& out) const;

  std::unordered_map<std::string, std::uint32_t> ranks_;
  std::string id_;
};

/// Words ([A-Za-z0-9_] runs, non-ASCII bytes included) count one token each,
/// every other non-blank character counts one; whitespace counts zero.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::size_t count(std::string_view text) const override;
  std::string id() const override { return "whitespace"; }
};

/// "whitespace" or "bpe:<path to rank file>".
struct TokenizerSpec {
  std::string kind = "whitespace";
  std::string path;

  static TokenizerSpec parse(std::string_view text);
  std::string to_string() const;
};

std::shared_ptr<const Tokenizer> make_tokenizer(const TokenizerSpec& spec);

inline std::size_t count_tokens(const Tokenizer& tokenizer, std::string_view text) {
  return tokenizer.count(text);
}

}  // namespace promptfold
