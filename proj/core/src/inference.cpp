#include "promptfold/inference.hpp"

#include <cctype>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

std::string normalize_type_reply(std::string_view reply) {
  std::string cleaned;
  for (char c : detail::trim(reply)) {
    auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u) && c != '_' && c != '-') {
      continue;
    }
    cleaned.push_back(static_cast<char>(std::tolower(u)));
  }
  auto words = detail::split_words(cleaned);
  return words.empty() ? std::string{} : words.front();
}

Classification resolve_type_reply(std::string_view reply, const QuestionTypeCatalog& catalog,
                                  std::string_view fallback_type) {
  if (!catalog.contains(fallback_type)) {
    throw ConfigError("fallback type '" + std::string(fallback_type) + "' is not in the catalog");
  }
  Classification out;
  out.raw_reply = std::string(reply);
  std::string word = normalize_type_reply(reply);
  if (!word.empty() && catalog.contains(word)) {
    out.type = word;
  } else {
    out.type = std::string(fallback_type);
    out.fallback = true;
  }
  return out;
}

Classification classify_question(std::string_view question, std::string_view classification_prompt,
                                 const QuestionTypeCatalog& catalog, LlmBackend& backend,
                                 const ClassifyOptions& options) {
  LlmRequest req;
  req.prompt = concat_prompt(classification_prompt, question);
  req.max_output_tokens = options.max_output_tokens;
  req.tag = "classify";
  return resolve_type_reply(backend.complete(req).text, catalog, options.fallback_type);
}

std::string assemble_preprompt(const CompressedPromptSet& set, std::string_view type,
                               std::string_view instruction, const AggregateOptions& options) {
  return aggregate(set.api_defs, instruction, set.bundle(type), options);
}

bool defines_entry_point(std::string_view code, std::string_view entry_point) {
  try {
    auto index = parse_api_definitions(std::string(code));
    for (const auto& block : index.blocks()) {
      if (block.kind == BlockKind::function && block.name == entry_point) {
        return true;
      }
    }
  } catch (const MalformedDefinitions&) {
  }
  return false;
}

GeneratedProgram generate_code(std::string_view preprompt, std::string_view question, LlmBackend& backend,
                               const GenerateOptions& options) {
  const std::string base = concat_prompt(preprompt, question);
  std::string prompt = base;
  GeneratedProgram out;
  out.entry_point = options.entry_point;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    LlmRequest req;
    req.prompt = prompt;
    req.max_output_tokens = options.max_output_tokens;
    req.tag = "generate";
    LlmResponse res = backend.complete(req);
    out.output_tokens += res.output_tokens;
    out.attempts = attempt;
    std::string code = extract_code_block(res.text);
    if (defines_entry_point(code, options.entry_point)) {
      out.code = std::move(code);
      return out;
    }
    prompt = concat_prompt(base, "Your previous answer was rejected: it did not define " +
                                     options.entry_point + "(image). Answer again with one code block.\n");
  }
  throw CodeExtractionFailed("no program defining " + options.entry_point + " after " +
                             std::to_string(options.max_attempts) + " attempts");
}

TokenBudget token_budget(const Tokenizer& tokenizer, std::string_view question,
                         const ApiDefinitionIndex& defs, const SnippetBundle& bundle,
                         std::string_view instruction, std::string_view classification_prompt,
                         BudgetMode mode, std::string_view comment_prefix) {
  std::size_t cls = mode == BudgetMode::adaptive ? tokenizer.count(classification_prompt) : 0;
  return compose_budget(tokenizer.count(defs.source_text()), tokenizer.count(instruction), cls,
                        bundle_tokens(tokenizer, bundle, comment_prefix), tokenizer.count(question), mode);
}

}  // namespace promptfold
