#include "promptfold/tokenizer.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b;
    if (b >= 0xF0 && b <= 0xF7) {
      len = 4;
      cp = b & 0x07;
    } else if (b >= 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if (b >= 0xC0) {
      len = 2;
      cp = b & 0x1F;
    }
    if (len > 1) {
      if (i + len > s.size()) {
        len = 1;
        cp = 0xFFFD;
      } else {
        for (std::size_t k = 1; k < len; ++k) {
          auto cont = static_cast<unsigned char>(s[i + k]);
          if ((cont & 0xC0) != 0x80) {
            len = 1;
            cp = 0xFFFD;
            break;
          }
          cp = (cp << 6) | (cont & 0x3F);
        }
      }
    } else if (b >= 0x80) {
      cp = 0xFFFD;  // stray continuation byte
    }
    out.push_back(CodePoint{cp, i, len});
    i += len;
  }
  return out;
}

bool is_ws(char32_t c) {
  if (c < 0x80) {
    return c == ' ' || (c >= 0x09 && c <= 0x0D);
  }
  return c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_num(char32_t c) {
  if (c < 0x80) {
    return c >= '0' && c <= '9';
  }
  return c == 0xB2 || c == 0xB3 || c == 0xB9 || (c >= 0xBC && c <= 0xBE) ||
         (c >= 0x660 && c <= 0x669) || (c >= 0x6F0 && c <= 0x6F9) || (c >= 0x966 && c <= 0x96F) ||
         (c >= 0x2070 && c <= 0x2079 && c != 0x2071) || (c >= 0x2080 && c <= 0x2089) ||
         (c >= 0x2150 && c <= 0x2189) || (c >= 0x2460 && c <= 0x249B) || c == 0x3007 ||
         (c >= 0x3021 && c <= 0x3029) || (c >= 0xFF10 && c <= 0xFF19);
}

bool is_letter(char32_t c) {
  if (c < 0x80) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  if (is_ws(c) || is_num(c)) {
    return false;
  }
  if (c < 0x100) {
    return c == 0xAA || c == 0xB5 || c == 0xBA || (c >= 0xC0 && c != 0xD7 && c != 0xF7);
  }
  // Marks, punctuation, symbols, private use and emoji blocks.
  if ((c >= 0x2C2 && c <= 0x2C5) || (c >= 0x2D2 && c <= 0x2DF) || (c >= 0x300 && c <= 0x36F) ||
      (c >= 0x2000 && c <= 0x2BFF) || (c >= 0x3000 && c <= 0x303F) ||
      (c >= 0xD800 && c <= 0xF8FF) || (c >= 0xFE00 && c <= 0xFE0F) ||
      (c >= 0xFE30 && c <= 0xFE4F) || (c >= 0xFF00 && c <= 0xFF0F) ||
      (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
      (c >= 0xFF5B && c <= 0xFF65) || (c >= 0x1F000 && c <= 0x1FAFF) || c == 0xFFFD) {
    return false;
  }
  return true;
}

bool is_other(char32_t c) { return !is_ws(c) && !is_letter(c) && !is_num(c); }
bool is_newline(char32_t c) { return c == '\r' || c == '\n'; }

char32_t ascii_lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + 32 : c; }

// Length in code points of the piece starting at `pos`.
std::size_t match_piece(const std::vector<CodePoint>& cps, std::size_t pos) {
  const std::size_t n = cps.size();
  auto at = [&](std::size_t i) -> char32_t { return i < n ? cps[i].value : 0; };

  // 's 't 're 've 'm 'll 'd (case-insensitive)
  if (at(pos) == '\'' && pos + 1 < n) {
    char32_t a = ascii_lower(at(pos + 1));
    char32_t b = pos + 2 < n ? ascii_lower(at(pos + 2)) : 0;
    if ((a == 'l' && b == 'l') || (a == 'v' && b == 'e') || (a == 'r' && b == 'e')) {
      return 3;
    }
    if (a == 's' || a == 'd' || a == 'm' || a == 't') {
      return 2;
    }
  }
  // [^\r\n\p{L}\p{N}]?\p{L}+
  {
    std::size_t i = pos;
    if (!is_letter(at(i)) && !is_newline(at(i)) && !is_num(at(i)) && i + 1 < n &&
        is_letter(at(i + 1))) {
      ++i;
    }
    if (i < n && is_letter(at(i))) {
      while (i < n && is_letter(at(i))) {
        ++i;
      }
      return i - pos;
    }
  }
  // \p{N}{1,3}
  if (is_num(at(pos))) {
    std::size_t i = pos;
    while (i < n && i - pos < 3 && is_num(at(i))) {
      ++i;
    }
    return i - pos;
  }
  //  ?[^\s\p{L}\p{N}]+[\r\n]*
  {
    std::size_t i = pos;
    if (at(i) == ' ') {
      ++i;
    }
    if (i < n && is_other(at(i))) {
      while (i < n && is_other(at(i))) {
        ++i;
      }
      while (i < n && is_newline(at(i))) {
        ++i;
      }
      return i - pos;
    }
  }
  if (is_ws(at(pos))) {
    std::size_t end = pos;
    while (end < n && is_ws(at(end))) {
      ++end;
    }
    // \s+$
    if (end == n) {
      return end - pos;
    }
    // \s*[\r\n]
    for (std::size_t j = end; j > pos; --j) {
      if (is_newline(at(j - 1))) {
        return j - pos;
      }
    }
    // \s+(?!\S)
    if (end - pos >= 2) {
      return end - pos - 1;
    }
    return 1;
  }
  return 1;
}

std::string decode_base64(std::string_view in) {
  std::string out(3 * ((in.size() + 3) / 4), '\0');
  int len = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(in.data()),
                            static_cast<int>(in.size()));
  if (len < 0) {
    throw TokenizerUnavailable("invalid base64 token '" + std::string(in) + "'");
  }
  std::size_t pad = 0;
  for (auto it = in.rbegin(); it != in.rend() && *it == '='; ++it) {
    ++pad;
  }
  out.resize(static_cast<std::size_t>(len) - pad);
  return out;
}

}  // namespace

std::vector<std::string_view> BpeTokenizer::split(std::string_view text) {
  auto cps = decode_utf8(text);
  std::vector<std::string_view> pieces;
  std::size_t pos = 0;
  while (pos < cps.size()) {
    std::size_t len = match_piece(cps, pos);
    std::size_t begin = cps[pos].offset;
    const CodePoint& last = cps[pos + len - 1];
    pieces.push_back(text.substr(begin, last.offset + last.length - begin));
    pos += len;
  }
  return pieces;
}

std::shared_ptr<const BpeTokenizer> BpeTokenizer::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TokenizerUnavailable("cannot open rank file '" + path + "'");
  }
  std::shared_ptr<BpeTokenizer> tok(new BpeTokenizer());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto space = line.find(' ');
    if (space == std::string::npos) {
      throw TokenizerUnavailable(path + ":" + std::to_string(line_no) + ": expected '<token> <rank>'");
    }
    std::uint32_t rank = 0;
    try {
      rank = static_cast<std::uint32_t>(std::stoul(line.substr(space + 1)));
    } catch (const std::exception&) {
      throw TokenizerUnavailable(path + ":" + std::to_string(line_no) + ": bad rank");
    }
    tok->ranks_.emplace(decode_base64(std::string_view(line).substr(0, space)), rank);
  }
  if (tok->ranks_.empty()) {
    throw TokenizerUnavailable("rank file '" + path + "' is empty");
  }
  tok->id_ = "bpe:" + std::filesystem::path(path).stem().string();
  return tok;
}

void BpeTokenizer::encode_piece(std::string_view piece, std::vector<std::uint32_t>& out) const {
  if (auto it = ranks_.find(std::string(piece)); it != ranks_.end()) {
    out.push_back(it->second);
    return;
  }
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  // parts[i] = start offset of the i-th current part; pair ranks kept alongside.
  std::vector<std::size_t> parts(piece.size() + 1);
  for (std::size_t i = 0; i <= piece.size(); ++i) {
    parts[i] = i;
  }
  auto rank_of = [&](std::size_t i) -> std::uint32_t {
    if (i + 2 >= parts.size()) {
      return kNone;
    }
    auto it = ranks_.find(std::string(piece.substr(parts[i], parts[i + 2] - parts[i])));
    return it == ranks_.end() ? kNone : it->second;
  };
  std::vector<std::uint32_t> pair_ranks(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    pair_ranks[i] = rank_of(i);
  }
  while (parts.size() > 2) {
    std::uint32_t best = kNone;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (pair_ranks[i] < best) {
        best = pair_ranks[i];
        best_i = i;
      }
    }
    if (best == kNone) {
      break;
    }
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
    pair_ranks.erase(pair_ranks.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
    pair_ranks[best_i] = rank_of(best_i);
    if (best_i > 0) {
      pair_ranks[best_i - 1] = rank_of(best_i - 1);
    }
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    auto it = ranks_.find(std::string(piece.substr(parts[i], parts[i + 1] - parts[i])));
    // Every single byte has a rank in a well-formed file.
    out.push_back(it == ranks_.end() ? kNone : it->second);
  }
}

std::vector<std::uint32_t> BpeTokenizer::encode(std::string_view text) const {
  std::vector<std::uint32_t> out;
  for (std::string_view piece : split(text)) {
    encode_piece(piece, out);
  }
  return out;
}

std::size_t BpeTokenizer::count(std::string_view text) const { return encode(text).size(); }

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
  std::size_t n = 0;
  std::size_t i = 0;
  auto is_word = [](char c) {
    return detail::is_ident_char(c) || static_cast<unsigned char>(c) >= 0x80;
  };
  while (i < text.size()) {
    char c = text[i];
    if (detail::is_space(c)) {
      ++i;
    } else if (is_word(c)) {
      while (i < text.size() && is_word(text[i])) {
        ++i;
      }
      ++n;
    } else {
      ++i;
      ++n;
    }
  }
  return n;
}

TokenizerSpec TokenizerSpec::parse(std::string_view text) {
  TokenizerSpec spec;
  if (text == "whitespace") {
    spec.kind = "whitespace";
  } else if (text.starts_with("bpe:")) {
    spec.kind = "bpe";
    spec.path = std::string(text.substr(4));
  } else {
    throw ConfigError("unknown tokenizer spec '" + std::string(text) +
                      "' (expected 'whitespace' or 'bpe:<rank file>')");
  }
  return spec;
}

std::string TokenizerSpec::to_string() const {
  return kind == "bpe" ? "bpe:" + path : kind;
}

std::shared_ptr<const Tokenizer> make_tokenizer(const TokenizerSpec& spec) {
  if (spec.kind == "whitespace") {
    return std::make_shared<WhitespaceTokenizer>();
  }
  if (spec.kind == "bpe") {
    return BpeTokenizer::load(spec.path);
  }
  throw TokenizerUnavailable("unknown tokenizer kind '" + spec.kind + "'");
}

}  // namespace promptfold
