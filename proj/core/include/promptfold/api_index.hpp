#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptfold {

/// Half-open character range [begin, end) into a source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const Span&) const = default;
};

enum class BlockKind { class_def, method, function };

std::string_view to_string(BlockKind kind) noexcept;

struct DefinitionBlock {
  std::string name;
  BlockKind kind = BlockKind::function;
  /// Enclosing class for methods, empty otherwise.
  std::optional<std::string> owner;
  /// From the first decorator or header line to the end of the last line
  /// indented deeper than the header (newline included).
  Span span;

  bool operator==(const DefinitionBlock&) const = default;
};

/// Index of the class, method and function definitions in a line-oriented,
/// indentation-structured definition source (Python-style).
///
/// Only top-level definitions and the methods directly inside a top-level
/// class are indexed; anything nested deeper is body text of its parent.
/// Sibling blocks never overlap; a class block contains its method blocks.
class ApiDefinitionIndex {
 public:
  ApiDefinitionIndex() = default;

  /// Throws MalformedDefinitions when no header is found or when an
  /// indented header cannot be attributed to exactly one enclosing block.
  static ApiDefinitionIndex parse(std::string source_text);

  const std::string& source_text() const noexcept { return source_; }
  std::span<const DefinitionBlock> blocks() const noexcept { return blocks_; }

  /// First method or function block with this name, in source order.
  const DefinitionBlock* find_callable(std::string_view name) const noexcept;
  bool contains(std::string_view name) const noexcept;

  /// Names of all blocks that are not private (leading underscore), in
  /// source order, deduplicated.
  std::vector<std::string> public_names() const;

  std::string_view text_of(const DefinitionBlock& block) const noexcept {
    return std::string_view(source_).substr(block.span.begin, block.span.size());
  }

  bool operator==(const ApiDefinitionIndex&) const = default;

 private:
  std::string source_;
  std::vector<DefinitionBlock> blocks_;
};

inline ApiDefinitionIndex parse_api_definitions(std::string text) {
  return ApiDefinitionIndex::parse(std::move(text));
}

}  // namespace promptfold
