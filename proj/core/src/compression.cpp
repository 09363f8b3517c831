#include "promptfold/compression.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <future>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

const std::vector<std::string>& default_required_api_names() {
  static const std::vector<std::string> names = {
      "find",          "exists",   "verify_property", "best_text_match",  "simple_query",
      "compute_depth", "crop",     "overlaps_with",   "llm_query",        "best_image_match",
      "distance",      "bool_to_yesno", "coerce_to_numeric"};
  return names;
}

std::string extract_code_block(std::string_view response) {
  auto lines = detail::split_lines(response);
  std::optional<std::string> best;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (!detail::trim_left(lines[i]).starts_with("```")) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    std::string body;
    while (j < lines.size() && !detail::trim_left(lines[j]).starts_with("```")) {
      body.append(lines[j]);
      body.push_back('\n');
      ++j;
    }
    if (j >= lines.size()) {
      break;  // unterminated fence
    }
    if (!best || body.size() > best->size()) {
      best = std::move(body);
    }
    i = j + 1;
  }
  return best ? *best : std::string(response);
}

namespace {

bool starts_definition(const std::vector<std::string_view>& para) {
  for (std::string_view line : para) {
    if (line.starts_with("#")) {
      continue;
    }
    return line.starts_with("def ") || line.starts_with("async def ");
  }
  return false;
}

std::string join(const std::vector<std::string_view>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) {
      out.push_back('\n');
    }
    out.append(lines[i]);
  }
  return out;
}

std::string retry_prompt(const std::string& prompt, const std::string& reason) {
  return concat_prompt(prompt, "Your previous answer was rejected: " + reason +
                                   "\nAnswer again and follow the instruction above.\n");
}

}  // namespace

std::vector<std::string> split_snippets(std::string_view code) {
  // Paragraphs of non-blank lines.
  std::vector<std::vector<std::string_view>> paras;
  std::vector<std::string_view> cur;
  for (std::string_view line : detail::split_lines(code)) {
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (detail::trim(line).empty()) {
      if (!cur.empty()) {
        paras.push_back(std::move(cur));
        cur.clear();
      }
      continue;
    }
    cur.push_back(line);
  }
  if (!cur.empty()) {
    paras.push_back(std::move(cur));
  }

  std::vector<std::vector<std::vector<std::string_view>>> groups;
  std::vector<std::vector<std::string_view>> preamble;
  for (auto& para : paras) {
    if (starts_definition(para)) {
      groups.push_back({});
      if (!preamble.empty()) {
        groups.back() = std::move(preamble);
        preamble.clear();
      }
      groups.back().push_back(std::move(para));
    } else if (groups.empty()) {
      preamble.push_back(std::move(para));
    } else {
      groups.back().push_back(std::move(para));
    }
  }

  std::vector<std::string> out;
  for (const auto& group : groups) {
    std::string text;
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i > 0) {
        text += "\n\n";
      }
      text += join(group[i]);
    }
    out.push_back(std::move(text));
  }
  return out;
}

DefsCompression compress_api_definitions(const PrepromptSource& source,
                                         const InstructionTemplates& templates, LlmBackend& backend,
                                         const CompressionOptions& options) {
  std::vector<std::string> required = options.required_names;
  if (required.empty()) {
    auto present = source.api_definitions.public_names();
    for (const auto& name : default_required_api_names()) {
      if (std::find(present.begin(), present.end(), name) != present.end()) {
        required.push_back(name);
      }
    }
  }

  const std::string base = concat_prompt(
      aggregate(source.api_definitions, source.coding_instruction, source.snippets, options.aggregate),
      render_rewrite_instruction(templates));
  std::string prompt = base;
  std::string reason;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    LlmRequest req;
    req.prompt = prompt;
    req.max_output_tokens = options.max_output_tokens;
    req.tag = "compress_defs";
    LlmResponse res = backend.complete(req);
    std::string text = extract_code_block(res.text);
    try {
      auto index = parse_api_definitions(text);
      std::vector<std::string> missing;
      for (const auto& name : required) {
        if (!index.contains(name)) {
          missing.push_back(name);
        }
      }
      if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) {
          list += (list.empty() ? "" : ", ") + m;
        }
        throw CompressionRejected("compressed definitions dropped " + list);
      }
      DefsCompression out{std::move(text), attempt, {}};
      if (detail::trim(out.text) == detail::trim(source.api_definitions.source_text())) {
        out.warnings.push_back("compressed definitions are identical to the source (no reduction)");
      }
      return out;
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::validation) {
        throw;
      }
      reason = e.what();
    }
    prompt = retry_prompt(base, reason);
  }
  throw CompressionRejected("API definitions rejected after " + std::to_string(options.max_attempts) +
                            " attempts; last reason: " + reason);
}

SnippetBundle compress_code_snippets(const PrepromptSource& source,
                                     const InstructionTemplates& templates,
                                     const std::optional<std::string>& type_definition,
                                     const std::string& id_prefix, const ApiDefinitionIndex& defs,
                                     LlmBackend& backend, const CompressionOptions& options) {
  std::string instruction = type_definition ? render_snippet_instruction(templates, *type_definition)
                                            : render_generic_snippet_instruction(templates);
  const std::string base = concat_prompt(
      aggregate(source.api_definitions, source.coding_instruction, source.snippets, options.aggregate),
      instruction);
  std::string prompt = base;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    LlmRequest req;
    req.prompt = prompt;
    req.max_output_tokens = options.max_output_tokens;
    req.tag = "compress_snippets:" + id_prefix;
    LlmResponse res = backend.complete(req);
    auto pieces = split_snippets(extract_code_block(res.text));
    if (!pieces.empty()) {
      std::vector<std::pair<std::string, std::string>> items;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        items.emplace_back(id_prefix + "-" + std::to_string(i + 1), std::move(pieces[i]));
      }
      return make_bundle(items, defs);
    }
    prompt = retry_prompt(base, "no code snippet defining a function was found");
  }
  throw CompressionRejected("no usable snippet for '" + id_prefix + "' after " +
                            std::to_string(options.max_attempts) + " attempts");
}

const SnippetBundle& CompressedPromptSet::bundle(std::string_view type) const {
  auto it = per_type.find(std::string(type));
  if (it == per_type.end()) {
    throw UnknownType("compressed set has no bundle for type '" + std::string(type) + "'");
  }
  return it->second;
}

std::size_t bundle_tokens(const Tokenizer& tokenizer, const SnippetBundle& bundle,
                          std::string_view comment_prefix) {
  return tokenizer.count(render_bundle(bundle, comment_prefix));
}

std::string default_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CompressedPromptSet build_compressed_set(const PrepromptSource& source,
                                         const QuestionTypeCatalog& catalog,
                                         const InstructionTemplates& templates, LlmBackend& backend,
                                         const Tokenizer& tokenizer,
                                         const CompressionOptions& options) {
  CompressedPromptSet set;
  auto defs = compress_api_definitions(source, templates, backend, options);
  set.api_defs = parse_api_definitions(defs.text);
  set.provenance.warnings = defs.warnings;

  auto one = [&](const QuestionType& type) {
    return compress_code_snippets(source, templates, type.definition, type.name, set.api_defs,
                                  backend, options);
  };
  if (options.concurrent && catalog.size() > 1) {
    std::vector<std::future<SnippetBundle>> jobs;
    for (const auto& type : catalog.types()) {
      jobs.push_back(std::async(std::launch::async, one, std::cref(type)));
    }
    // Drain every job before rethrowing so no thread outlives the call.
    std::exception_ptr failure;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      try {
        set.per_type.emplace(catalog.types()[i].name, jobs[i].get());
      } catch (...) {
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
    if (failure) {
      std::rethrow_exception(failure);
    }
  } else {
    for (const auto& type : catalog.types()) {
      set.per_type.emplace(type.name, one(type));
    }
  }
  if (options.build_generic) {
    set.generic = compress_code_snippets(source, templates, std::nullopt, "generic", set.api_defs,
                                         backend, options);
  }

  auto& p = set.provenance;
  p.backend_id = backend.id();
  p.created_at = options.timestamp.empty() ? default_timestamp() : options.timestamp;
  p.template_version = templates.version;
  p.tokenizer = tokenizer.id();
  const std::string& prefix = options.aggregate.comment_prefix;
  p.token_counts["api_defs"] = tokenizer.count(set.api_defs.source_text());
  p.token_counts["rewrite_instruction"] = tokenizer.count(render_rewrite_instruction(templates));
  p.token_counts["classification"] = tokenizer.count(render_classification_prompt(templates, catalog));
  for (const auto& type : catalog.types()) {
    p.token_counts["snippets:" + type.name] = bundle_tokens(tokenizer, set.per_type.at(type.name), prefix);
    p.token_counts["snippet_instruction:" + type.name] =
        tokenizer.count(render_snippet_instruction(templates, type.definition));
  }
  if (set.generic) {
    p.token_counts["snippets:generic"] = bundle_tokens(tokenizer, *set.generic, prefix);
  }
  return set;
}

}  // namespace promptfold
