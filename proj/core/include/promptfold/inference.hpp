#pragma once

#include <string>
#include <string_view>

#include "promptfold/aggregate.hpp"
#include "promptfold/budget.hpp"
#include "promptfold/catalog.hpp"
#include "promptfold/compression.hpp"
#include "promptfold/llm.hpp"
#include "promptfold/tokenizer.hpp"

namespace promptfold {

inline constexpr std::string_view kDefaultEntryPoint = "execute_command";
inline constexpr std::string_view kDefaultFallbackType = "attr";

/// Trim, lowercase, drop punctuation other than '_' and '-', keep the
/// first whitespace-delimited word. May return an empty string.
std::string normalize_type_reply(std::string_view reply);

struct Classification {
  std::string type;
  /// The reply did not name a catalog type and `type` is the fallback.
  bool fallback = false;
  std::string raw_reply;
};

/// Maps a raw reply onto the catalog. Throws ConfigError when `fallback_type`
/// is not itself a catalog member.
Classification resolve_type_reply(std::string_view reply, const QuestionTypeCatalog& catalog,
                                  std::string_view fallback_type = kDefaultFallbackType);

struct ClassifyOptions {
  std::string fallback_type{kDefaultFallbackType};
  int max_output_tokens = kDefaultClassifyMaxTokens;
};

/// Sends the classification prompt followed by the question.
Classification classify_question(std::string_view question, std::string_view classification_prompt,
                                 const QuestionTypeCatalog& catalog, LlmBackend& backend,
                                 const ClassifyOptions& options = {});

/// Ψ over the compressed definitions, the instruction and the type's bundle.
/// Throws UnknownType.
std::string assemble_preprompt(const CompressedPromptSet& set, std::string_view type,
                               std::string_view instruction, const AggregateOptions& options = {});

struct GeneratedProgram {
  std::string code;
  std::string entry_point;
  TokenBudget source_budget;
  int attempts = 0;
  std::size_t output_tokens = 0;
};

struct GenerateOptions {
  std::string entry_point{kDefaultEntryPoint};
  int max_attempts = 3;
  int max_output_tokens = kDefaultCodegenMaxTokens;
};

/// True when `code` defines a top-level function named `entry_point`.
bool defines_entry_point(std::string_view code, std::string_view entry_point);

/// Sends preprompt followed by the question, extracts the code and checks
/// the entry point, retrying with the rejection appended. Throws
/// CodeExtractionFailed when every attempt fails.
GeneratedProgram generate_code(std::string_view preprompt, std::string_view question, LlmBackend& backend,
                               const GenerateOptions& options = {});

/// Budget from separately counted parts. In single_call mode the
/// classification prompt is ignored.
TokenBudget token_budget(const Tokenizer& tokenizer, std::string_view question,
                         const ApiDefinitionIndex& defs, const SnippetBundle& bundle,
                         std::string_view instruction, std::string_view classification_prompt,
                         BudgetMode mode, std::string_view comment_prefix = "#");

}  // namespace promptfold
