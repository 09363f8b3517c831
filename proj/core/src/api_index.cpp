#include "promptfold/api_index.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

std::string_view to_string(BlockKind kind) noexcept {
  switch (kind) {
    case BlockKind::class_def:
      return "class";
    case BlockKind::method:
      return "method";
    case BlockKind::function:
      return "function";
  }
  return "function";
}

namespace {

struct Line {
  std::size_t begin = 0;
  std::size_t content_end = 0;  // excludes the line terminator
  std::size_t next = 0;         // start of the following line
  int indent = 0;
  bool blank = false;
  bool comment = false;
  // True when the line starts outside any string literal, bracket pair or
  // backslash continuation, i.e. its indentation is meaningful.
  bool structural = true;
  // True when the line leaves a string, bracket or backslash open.
  bool continues = false;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct ScanState {
  char quote = 0;
  bool triple = false;
  int depth = 0;
  bool backslash = false;
};

int measure_indent(std::string_view line) {
  int col = 0;
  for (char c : line) {
    if (c == ' ') {
      ++col;
    } else if (c == '\t') {
      col = (col / 8 + 1) * 8;
    } else if (c == '\f') {
      col = 0;
    } else {
      break;
    }
  }
  return col;
}

// Advances the lexical state over one line of Python-like source.
void scan_line(std::string_view text, ScanState& st) {
  st.backslash = false;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (st.quote != 0) {
      if (c == '\\') {
        i += 2;
        continue;
      }
      if (c == st.quote) {
        if (!st.triple) {
          st.quote = 0;
          ++i;
          continue;
        }
        if (text.substr(i, 3) == std::string(3, st.quote)) {
          st.quote = 0;
          st.triple = false;
          i += 3;
          continue;
        }
      }
      ++i;
      continue;
    }
    if (c == '#') {
      return;
    }
    if (c == '"' || c == '\'') {
      if (text.substr(i, 3) == std::string(3, c)) {
        st.quote = c;
        st.triple = true;
        i += 3;
      } else {
        st.quote = c;
        st.triple = false;
        ++i;
      }
      continue;
    }
    if (c == '(' || c == '[' || c == '{') {
      ++st.depth;
    } else if (c == ')' || c == ']' || c == '}') {
      st.depth = std::max(0, st.depth - 1);
    }
    ++i;
  }
  bool ends_with_backslash = !text.empty() && text.back() == '\\';
  if (st.quote != 0 && !st.triple) {
    // Unterminated single-line string; only a trailing backslash keeps it open.
    if (!ends_with_backslash) {
      st.quote = 0;
    }
    return;
  }
  if (st.quote == 0 && ends_with_backslash) {
    st.backslash = true;
  }
}

std::vector<Line> split_lines(const std::string& src) {
  std::vector<Line> lines;
  ScanState st;
  std::size_t pos = 0;
  while (pos < src.size()) {
    Line line;
    line.begin = pos;
    std::size_t nl = src.find('\n', pos);
    line.next = nl == std::string::npos ? src.size() : nl + 1;
    line.content_end = nl == std::string::npos ? src.size() : nl;
    std::string_view body(src.data() + line.begin, line.content_end - line.begin);
    if (!body.empty() && body.back() == '\r') {
      body.remove_suffix(1);
    }
    line.structural = st.quote == 0 && st.depth == 0 && !st.backslash;
    line.indent = measure_indent(body);
    std::string_view rest = detail::trim_left(body);
    line.blank = rest.empty();
    line.comment = line.structural && !rest.empty() && rest.front() == '#';
    scan_line(body, st);
    line.continues = st.quote != 0 || st.depth > 0 || st.backslash;
    lines.push_back(line);
    pos = line.next;
  }
  return lines;
}

struct Header {
  BlockKind kind;  // class_def or function; methods are decided by context
  std::string name;
};

std::optional<std::string> take_identifier(std::string_view& s) {
  if (s.empty() || !detail::is_ident_start(s.front())) {
    return std::nullopt;
  }
  std::size_t n = 1;
  while (n < s.size() && detail::is_ident_char(s[n])) {
    ++n;
  }
  std::string out(s.substr(0, n));
  s.remove_prefix(n);
  return out;
}

bool take_keyword(std::string_view& s, std::string_view kw) {
  if (s.substr(0, kw.size()) != kw) {
    return false;
  }
  std::string_view after = s.substr(kw.size());
  if (after.empty() || (after.front() != ' ' && after.front() != '\t')) {
    return false;
  }
  s = detail::trim_left(after);
  return true;
}

std::optional<Header> parse_header(std::string_view line_text) {
  std::string_view s = detail::trim_left(line_text);
  bool is_class = false;
  if (take_keyword(s, "class")) {
    is_class = true;
  } else if (take_keyword(s, "async")) {
    if (!take_keyword(s, "def")) {
      return std::nullopt;
    }
  } else if (!take_keyword(s, "def")) {
    return std::nullopt;
  }
  auto name = take_identifier(s);
  if (!name) {
    return std::nullopt;
  }
  s = detail::trim_left(s);
  if (s.empty()) {
    return std::nullopt;
  }
  // def needs a parameter list; class accepts a base list or a bare colon.
  if (s.front() != '(' && !(is_class && s.front() == ':')) {
    return std::nullopt;
  }
  return Header{is_class ? BlockKind::class_def : BlockKind::function, std::move(*name)};
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src), lines_(split_lines(src)) {}

  std::vector<DefinitionBlock> run() {
    int base_indent = -1;
    std::size_t decorator_begin = kNone;
    int decorator_indent = -1;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const Line& line = lines_[i];
      if (!line.structural || line.blank || line.comment) {
        continue;
      }
      std::string_view text = text_of(line);
      if (detail::trim_left(text).starts_with('@')) {
        if (decorator_begin == kNone) {
          decorator_begin = line.begin;
          decorator_indent = line.indent;
        }
        i = skip_continuation(i);
        continue;
      }
      auto header = parse_header(text);
      if (!header) {
        decorator_begin = kNone;
        continue;
      }
      if (base_indent < 0) {
        base_indent = line.indent;
      }
      if (line.indent != base_indent) {
        fail(i, "definition indented at column " + std::to_string(line.indent) +
                    " outside of any block (top-level definitions start at column " +
                    std::to_string(base_indent) + ")");
      }
      std::size_t last = block_end(i, line.indent);
      std::size_t begin = (decorator_begin != kNone && decorator_indent == line.indent) ? decorator_begin
                                                                               : line.begin;
      decorator_begin = kNone;
      push(DefinitionBlock{header->name, header->kind, std::nullopt, {begin, lines_[last].next}}, i);
      if (header->kind == BlockKind::class_def) {
        parse_methods(i, last, header->name, line.indent);
      }
      i = last;
    }
    if (blocks_.empty()) {
      throw MalformedDefinitions("no class, method or function definition headers found");
    }
    std::stable_sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) {
      return a.span.begin < b.span.begin;
    });
    return std::move(blocks_);
  }

 private:
  std::string_view text_of(const Line& line) const {
    return std::string_view(src_).substr(line.begin, line.content_end - line.begin);
  }

  std::size_t skip_continuation(std::size_t i) const {
    while (i + 1 < lines_.size() && lines_[i].continues) {
      ++i;
    }
    return i;
  }

  // Index of the last line belonging to the block whose header is line i.
  std::size_t block_end(std::size_t i, int header_indent) const {
    std::size_t last = skip_continuation(i);
    for (std::size_t k = last + 1; k < lines_.size(); ++k) {
      const Line& m = lines_[k];
      if (!m.structural) {
        last = k;
        continue;
      }
      if (m.blank) {
        continue;
      }
      if (m.indent > header_indent) {
        last = k;
        continue;
      }
      if (m.comment) {
        continue;
      }
      break;
    }
    return last;
  }

  void parse_methods(std::size_t class_line, std::size_t class_last, const std::string& owner,
                     int class_indent) {
    int body_indent = -1;
    std::size_t decorator_begin = kNone;
    for (std::size_t k = skip_continuation(class_line) + 1; k <= class_last; ++k) {
      const Line& line = lines_[k];
      if (!line.structural || line.blank || line.comment || line.indent <= class_indent) {
        continue;
      }
      if (body_indent < 0) {
        body_indent = line.indent;
      }
      std::string_view text = text_of(line);
      if (line.indent == body_indent && detail::trim_left(text).starts_with('@')) {
        if (decorator_begin == kNone) {
          decorator_begin = line.begin;
        }
        k = skip_continuation(k);
        continue;
      }
      auto header = parse_header(text);
      if (!header) {
        if (line.indent == body_indent) {
          decorator_begin = kNone;
        }
        continue;
      }
      if (line.indent < body_indent) {
        fail(k, "definition at column " + std::to_string(line.indent) + " inside class '" + owner +
                    "' whose body is indented to column " + std::to_string(body_indent));
      }
      if (line.indent > body_indent) {
        continue;  // nested deeper than a method: body text
      }
      std::size_t last = block_end(k, line.indent);
      if (header->kind == BlockKind::function) {
        std::size_t begin = decorator_begin != kNone ? decorator_begin : line.begin;
        push(DefinitionBlock{header->name, BlockKind::method, owner, {begin, lines_[last].next}}, k);
      }
      decorator_begin = kNone;
      k = last;
    }
  }

  void push(DefinitionBlock block, std::size_t line_index) {
    auto key = std::make_pair(block.owner.value_or(std::string{}), block.name);
    if (!seen_.insert(key).second) {
      fail(line_index, "duplicate definition of '" + block.name + "'" +
                           (block.owner ? " in class '" + *block.owner + "'" : std::string{}));
    }
    blocks_.push_back(std::move(block));
  }

  [[noreturn]] void fail(std::size_t line_index, const std::string& what) const {
    throw MalformedDefinitions("line " + std::to_string(line_index + 1) + ": " + what);
  }

  const std::string& src_;
  std::vector<Line> lines_;
  std::vector<DefinitionBlock> blocks_;
  std::set<std::pair<std::string, std::string>> seen_;
};

}  // namespace

ApiDefinitionIndex ApiDefinitionIndex::parse(std::string source_text) {
  ApiDefinitionIndex index;
  index.source_ = std::move(source_text);
  index.blocks_ = Parser(index.source_).run();
  return index;
}

const DefinitionBlock* ApiDefinitionIndex::find_callable(std::string_view name) const noexcept {
  for (const auto& block : blocks_) {
    if (block.kind != BlockKind::class_def && block.name == name) {
      return &block;
    }
  }
  return nullptr;
}

bool ApiDefinitionIndex::contains(std::string_view name) const noexcept {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [&](const DefinitionBlock& b) { return b.name == name; });
}

std::vector<std::string> ApiDefinitionIndex::public_names() const {
  std::vector<std::string> names;
  for (const auto& block : blocks_) {
    if (block.name.starts_with('_')) {
      continue;
    }
    if (std::find(names.begin(), names.end(), block.name) == names.end()) {
      names.push_back(block.name);
    }
  }
  return names;
}

}  // namespace promptfold
