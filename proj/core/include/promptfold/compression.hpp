#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptfold/aggregate.hpp"
#include "promptfold/catalog.hpp"
#include "promptfold/llm.hpp"
#include "promptfold/snippets.hpp"
#include "promptfold/templates.hpp"
#include "promptfold/tokenizer.hpp"

namespace promptfold {

/// The 13 public names of the shipped ImagePatch API.
const std::vector<std::string>& default_required_api_names();

/// Content of the largest ``` fenced block (lines between the fences, each
/// ending in '\n'); the whole response when it has no complete fence.
std::string extract_code_block(std::string_view response);

/// Splits generated code into snippets. A snippet starts at a paragraph
/// (blank-line delimited) whose first code line is a column-0 `def` header,
/// optionally preceded by comment lines; other paragraphs continue the
/// current snippet. Leading and trailing blank lines are dropped.
/// Returns an empty list when no paragraph holds a definition.
std::vector<std::string> split_snippets(std::string_view code);

struct CompressionOptions {
  int max_attempts = 3;
  int max_output_tokens = 2048;
  /// Names the compressed definitions must keep. Empty selects the default
  /// API names that occur in the source.
  std::vector<std::string> required_names;
  AggregateOptions aggregate;
  /// Compress per-type bundles concurrently.
  bool concurrent = true;
  /// Also build the type-agnostic bundle used by the simple-compression ablation.
  bool build_generic = true;
  /// Recorded creation time; empty uses SOURCE_DATE_EPOCH when set, else now.
  std::string timestamp;
};

struct DefsCompression {
  std::string text;
  int attempts = 0;
  std::vector<std::string> warnings;
};

/// Sends Ψ(source) followed by the rewrite instruction and validates that
/// the extracted definitions parse and keep every required name. Retries
/// with the rejection reason appended; throws CompressionRejected when all
/// attempts fail.
DefsCompression compress_api_definitions(const PrepromptSource& source,
                                         const InstructionTemplates& templates, LlmBackend& backend,
                                         const CompressionOptions& options = {});

/// Sends Ψ(source) followed by the snippet instruction for `type_definition`
/// (the generic instruction when absent) and splits the response into a
/// bundle with ids "<id_prefix>-1", "<id_prefix>-2", ... and anchors resolved
/// against `defs`. Throws CompressionRejected when no snippet is found.
SnippetBundle compress_code_snippets(const PrepromptSource& source,
                                     const InstructionTemplates& templates,
                                     const std::optional<std::string>& type_definition,
                                     const std::string& id_prefix, const ApiDefinitionIndex& defs,
                                     LlmBackend& backend, const CompressionOptions& options = {});

struct Provenance {
  std::string backend_id;
  std::string created_at;
  std::string template_version;
  std::string tokenizer;
  /// "api_defs", "snippets:<type>", "snippets:generic", "rewrite_instruction",
  /// "snippet_instruction:<type>", "classification".
  std::map<std::string, std::size_t> token_counts;
  std::vector<std::string> warnings;

  bool operator==(const Provenance&) const = default;
};

/// The cached compressed prompts.
struct CompressedPromptSet {
  ApiDefinitionIndex api_defs;
  std::map<std::string, SnippetBundle> per_type;
  std::optional<SnippetBundle> generic;
  Provenance provenance;
  /// Set by load_set when the file was written under another tokenizer.
  bool tokenizer_mismatch = false;

  /// Throws UnknownType.
  const SnippetBundle& bundle(std::string_view type) const;

  bool operator==(const CompressedPromptSet&) const = default;
};

/// Compresses the definitions once, then one bundle per catalog type (and
/// the generic bundle when enabled), and records provenance. Nothing is
/// returned or persisted unless every part succeeds.
CompressedPromptSet build_compressed_set(const PrepromptSource& source,
                                         const QuestionTypeCatalog& catalog,
                                         const InstructionTemplates& templates, LlmBackend& backend,
                                         const Tokenizer& tokenizer,
                                         const CompressionOptions& options = {});

/// Snippet-part tokens: the bundle rendered as column-0 comments.
std::size_t bundle_tokens(const Tokenizer& tokenizer, const SnippetBundle& bundle,
                          std::string_view comment_prefix = "#");

/// ISO-8601 UTC time from SOURCE_DATE_EPOCH, or the current time.
std::string default_timestamp();

}  // namespace promptfold
