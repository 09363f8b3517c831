#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "promptfold/api_index.hpp"

namespace promptfold {

struct Snippet {
  std::string id;
  std::string code;
  /// API identifiers called by the snippet, in order of first call.
  std::vector<std::string> anchors;

  bool operator==(const Snippet&) const = default;
};

struct SnippetBundle {
  std::vector<Snippet> snippets;

  bool empty() const noexcept { return snippets.empty(); }
  std::size_t size() const noexcept { return snippets.size(); }
  bool operator==(const SnippetBundle&) const = default;
};

/// Every identifier in `code` that names a method or function of `index` and
/// is followed by '(' (optionally after blanks). Comments, string literals and
/// the name being defined in a `def` header are skipped. Ordered by first
/// occurrence, duplicates removed.
std::vector<std::string> scan_anchor_names(std::string_view code, const ApiDefinitionIndex& index);

/// Builds a bundle from (id, code) pairs, filling anchors from `index`.
/// Throws InvalidArgument on empty code or duplicate ids.
SnippetBundle make_bundle(const std::vector<std::pair<std::string, std::string>>& items,
                          const ApiDefinitionIndex& index);

/// Parses `{ "snippets": [ { "id": str, "code": str } ] }`.
SnippetBundle parse_snippet_library(std::string_view json_text, const ApiDefinitionIndex& index);

/// The uncompressed preprompt material.
struct PrepromptSource {
  ApiDefinitionIndex api_definitions;
  SnippetBundle snippets;
  std::string coding_instruction;
};

/// Loads definitions text, snippet library JSON and instruction text.
/// Throws ConfigError when a file is unreadable or the instruction is empty.
PrepromptSource load_preprompt_source(const std::string& definitions_path,
                                      const std::string& snippets_path,
                                      const std::string& instruction_path);

}  // namespace promptfold
