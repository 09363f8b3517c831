#include "promptfold/snippets.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

std::vector<std::string> scan_anchor_names(std::string_view code, const ApiDefinitionIndex& index) {
  std::vector<std::string> out;
  std::size_t i = 0;
  bool after_def = false;
  while (i < code.size()) {
    char c = code[i];
    if (c == '#') {
      while (i < code.size() && code[i] != '\n') {
        ++i;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      bool triple = code.substr(i, 3) == std::string(3, c);
      std::size_t j = i + (triple ? 3 : 1);
      while (j < code.size()) {
        if (code[j] == '\\') {
          j += 2;
          continue;
        }
        if (triple ? code.substr(j, 3) == std::string(3, c) : code[j] == c) {
          j += triple ? 3 : 1;
          break;
        }
        if (!triple && code[j] == '\n') {
          break;
        }
        ++j;
      }
      i = std::min(j, code.size());
      after_def = false;
      continue;
    }
    if (detail::is_ident_start(c) && (i == 0 || !detail::is_ident_char(code[i - 1]))) {
      std::size_t j = i;
      while (j < code.size() && detail::is_ident_char(code[j])) {
        ++j;
      }
      std::string_view ident = code.substr(i, j - i);
      std::size_t k = j;
      while (k < code.size() && (code[k] == ' ' || code[k] == '\t')) {
        ++k;
      }
      bool is_call = k < code.size() && code[k] == '(';
      if (is_call && !after_def && index.find_callable(ident) != nullptr &&
          std::find(out.begin(), out.end(), ident) == out.end()) {
        out.emplace_back(ident);
      }
      after_def = ident == "def";
      i = j;
      continue;
    }
    if (!detail::is_space(c)) {
      after_def = false;
    }
    ++i;
  }
  return out;
}

SnippetBundle make_bundle(const std::vector<std::pair<std::string, std::string>>& items,
                          const ApiDefinitionIndex& index) {
  SnippetBundle bundle;
  std::set<std::string> ids;
  for (const auto& [id, code] : items) {
    if (detail::trim(code).empty()) {
      throw InvalidArgument("snippet '" + id + "' has empty code");
    }
    if (!ids.insert(id).second) {
      throw InvalidArgument("duplicate snippet id '" + id + "'");
    }
    bundle.snippets.push_back(Snippet{id, code, scan_anchor_names(code, index)});
  }
  return bundle;
}

SnippetBundle parse_snippet_library(std::string_view json_text, const ApiDefinitionIndex& index) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("snippet library is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("snippets") || !doc["snippets"].is_array()) {
    throw ConfigError("snippet library must be an object with a 'snippets' array");
  }
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& entry : doc["snippets"]) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("code") ||
        !entry["id"].is_string() || !entry["code"].is_string()) {
      throw ConfigError("each snippet needs string fields 'id' and 'code'");
    }
    items.emplace_back(entry["id"].get<std::string>(), entry["code"].get<std::string>());
  }
  try {
    return make_bundle(items, index);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

PrepromptSource load_preprompt_source(const std::string& definitions_path,
                                      const std::string& snippets_path,
                                      const std::string& instruction_path) {
  PrepromptSource source;
  source.api_definitions = ApiDefinitionIndex::parse(detail::read_file(definitions_path));
  source.snippets = parse_snippet_library(detail::read_file(snippets_path), source.api_definitions);
  source.coding_instruction = detail::read_file(instruction_path);
  if (detail::trim(source.coding_instruction).empty()) {
    throw ConfigError("coding instruction '" + instruction_path + "' is empty");
  }
  return source;
}

}  // namespace promptfold
