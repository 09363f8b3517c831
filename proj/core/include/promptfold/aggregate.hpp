#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "promptfold/api_index.hpp"
#include "promptfold/snippets.hpp"

namespace promptfold {

struct AggregateOptions {
  /// Line-comment prefix of the definition language.
  std::string comment_prefix = "#";
};

/// One inserted fragment of an aggregated preprompt, in output coordinates.
struct Insertion {
  std::size_t offset = 0;
  std::size_t length = 0;
  /// Snippet id, or empty for separators and the instruction.
  std::string snippet_id;
  /// Owning block name for placed snippets, empty for trailing ones.
  std::string anchor;
};

struct AggregateLayout {
  std::string text;
  std::vector<Insertion> insertions;
};

/// Renders `code` line by line as comments: "<indent><prefix> line", or
/// "<indent><prefix>" for blank lines. Every line ends with '\n'.
std::string render_comment_block(std::string_view code, std::string_view indent,
                                 std::string_view prefix);

/// Concatenation of all snippets of a bundle rendered as column-0 comments.
std::string render_bundle(const SnippetBundle& bundle, std::string_view prefix = "#");

/// Structural aggregation of definitions, snippets and coding instruction.
///
/// Each snippet is inserted once, as a comment block indented like the
/// definition it belongs to, right after the block of the first API it calls
/// (resolved against `defs`). Snippets without a resolvable call go to a
/// trailing comment section. The instruction comes last. Removing every
/// insertion restores `defs.source_text()` byte for byte.
AggregateLayout aggregate_with_layout(const ApiDefinitionIndex& defs, std::string_view instruction,
                                      const SnippetBundle& snippets,
                                      const AggregateOptions& options = {});

inline std::string aggregate(const ApiDefinitionIndex& defs, std::string_view instruction,
                             const SnippetBundle& snippets, const AggregateOptions& options = {}) {
  return aggregate_with_layout(defs, instruction, snippets, options).text;
}

/// Removes every insertion of `layout` from its text.
std::string strip_insertions(const AggregateLayout& layout);

/// Textual concatenation of a preprompt and what follows it: the two parts
/// are separated by exactly one line break.
std::string concat_prompt(std::string_view head, std::string_view tail);

}  // namespace promptfold
