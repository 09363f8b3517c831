#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "promptfold/catalog.hpp"

namespace promptfold {

/// Instruction templates of the compression and classification prompts.
struct InstructionTemplates {
  /// Rewrite-the-definitions instruction (no placeholders).
  std::string rewrite;
  /// Write-snippets instruction (no placeholders).
  std::string write_snippets;
  /// Specialization suffix with one `{type_definition}` placeholder.
  std::string specialize;
  /// Classification prompt; the line holding `{type[i]}` and
  /// `{type_definition[i]}` is repeated once per catalog type.
  std::string classification;
  std::string version;

  /// Reads rewrite_definitions.txt, write_snippets.txt, specialize.txt,
  /// classification.txt and version.txt (optional) from `dir`.
  /// Throws TemplateMissing when a required file is absent.
  static InstructionTemplates load_dir(const std::string& dir);

  bool operator==(const InstructionTemplates&) const = default;
};

/// Every `{name}` or `{name[i]}` placeholder of `text`, in order.
std::vector<std::string> find_placeholders(std::string_view text);

/// The rewrite instruction verbatim. Throws TemplateMissing if it still
/// holds a placeholder.
std::string render_rewrite_instruction(const InstructionTemplates& templates);

/// Write-snippets instruction followed by the specialization suffix with
/// its placeholder replaced by `type_definition`. Throws InvalidArgument on
/// an empty definition and TemplateMissing on any other placeholder.
std::string render_snippet_instruction(const InstructionTemplates& templates,
                                       std::string_view type_definition);

/// Write-snippets instruction alone, for the type-agnostic bundle.
std::string render_generic_snippet_instruction(const InstructionTemplates& templates);

/// Classification prompt with one (name, definition) line per type in
/// catalog order. Throws TemplateMissing when the template has no
/// per-type line or an unknown placeholder.
std::string render_classification_prompt(const InstructionTemplates& templates,
                                         const QuestionTypeCatalog& catalog);

}  // namespace promptfold
