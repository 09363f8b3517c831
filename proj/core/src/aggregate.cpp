#include "promptfold/aggregate.hpp"

#include <algorithm>
#include <map>

#include "text_util.hpp"

namespace promptfold {

std::string render_comment_block(std::string_view code, std::string_view indent,
                                 std::string_view prefix) {
  std::string out;
  for (std::string_view line : detail::split_lines(code)) {
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    out.append(indent);
    out.append(prefix);
    if (!line.empty()) {
      out.push_back(' ');
      out.append(line);
    }
    out.push_back('\n');
  }
  return out;
}

std::string render_bundle(const SnippetBundle& bundle, std::string_view prefix) {
  std::string out;
  for (const auto& snippet : bundle.snippets) {
    out += render_comment_block(snippet.code, "", prefix);
  }
  return out;
}

namespace {

std::string indent_of(std::string_view source, std::size_t line_begin) {
  std::size_t end = line_begin;
  while (end < source.size() && (source[end] == ' ' || source[end] == '\t')) {
    ++end;
  }
  return std::string(source.substr(line_begin, end - line_begin));
}

class Builder {
 public:
  void copy(std::string_view s) { out_.text.append(s); }

  void insert(std::string_view s, std::string id = {}, std::string anchor = {}) {
    if (s.empty()) {
      return;
    }
    out_.insertions.push_back(Insertion{out_.text.size(), s.size(), std::move(id), std::move(anchor)});
    out_.text.append(s);
  }

  bool ends_with_newline() const { return !out_.text.empty() && out_.text.back() == '\n'; }
  bool empty() const { return out_.text.empty(); }

  AggregateLayout take() { return std::move(out_); }

 private:
  AggregateLayout out_;
};

}  // namespace

AggregateLayout aggregate_with_layout(const ApiDefinitionIndex& defs, std::string_view instruction,
                                      const SnippetBundle& snippets,
                                      const AggregateOptions& options) {
  const std::string& source = defs.source_text();

  // Group snippets by the end offset of their first anchor's block.
  struct Placed {
    const Snippet* snippet;
    const DefinitionBlock* block;
  };
  std::map<std::size_t, std::vector<Placed>> placed;
  std::vector<const Snippet*> trailing;
  for (const auto& snippet : snippets.snippets) {
    auto anchors = scan_anchor_names(snippet.code, defs);
    const DefinitionBlock* block = anchors.empty() ? nullptr : defs.find_callable(anchors.front());
    if (block == nullptr) {
      trailing.push_back(&snippet);
    } else {
      placed[block->span.end].push_back(Placed{&snippet, block});
    }
  }

  Builder out;
  std::size_t cursor = 0;
  for (const auto& [offset, group] : placed) {
    out.copy(std::string_view(source).substr(cursor, offset - cursor));
    cursor = offset;
    if (!out.ends_with_newline()) {
      out.insert("\n");
    }
    for (const auto& p : group) {
      std::string indent = indent_of(source, p.block->span.begin);
      out.insert(render_comment_block(p.snippet->code, indent, options.comment_prefix),
                 p.snippet->id, p.block->name);
    }
  }
  out.copy(std::string_view(source).substr(cursor));

  if (!trailing.empty()) {
    out.insert(out.ends_with_newline() ? "\n" : "\n\n");
    for (const Snippet* s : trailing) {
      out.insert(render_comment_block(s->code, "", options.comment_prefix), s->id);
    }
  }
  if (!out.empty()) {
    out.insert(out.ends_with_newline() ? "\n" : "\n\n");
  }
  out.insert(instruction);
  return out.take();
}

std::string strip_insertions(const AggregateLayout& layout) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& ins : layout.insertions) {
    out.append(layout.text, cursor, ins.offset - cursor);
    cursor = ins.offset + ins.length;
  }
  out.append(layout.text, cursor, std::string::npos);
  return out;
}

std::string concat_prompt(std::string_view head, std::string_view tail) {
  std::string out(head);
  if (!out.empty() && out.back() != '\n') {
    out.push_back('\n');
  }
  out.append(tail);
  return out;
}

}  // namespace promptfold
