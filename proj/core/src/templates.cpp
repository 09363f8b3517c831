#include "promptfold/templates.hpp"

#include <filesystem>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

namespace {

constexpr std::string_view kTypeDefinition = "{type_definition}";
constexpr std::string_view kTypeName = "{type[i]}";
constexpr std::string_view kTypeDefinitionI = "{type_definition[i]}";

std::string read_template(const std::filesystem::path& dir, const char* name, bool required) {
  auto path = dir / name;
  if (!std::filesystem::exists(path)) {
    if (required) {
      throw TemplateMissing("no template file " + path.string());
    }
    return {};
  }
  return detail::read_file(path.string());
}

void reject_placeholders(std::string_view text, std::string_view what) {
  auto found = find_placeholders(text);
  if (!found.empty()) {
    throw TemplateMissing(std::string(what) + " has unresolved placeholder " + found.front());
  }
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace

InstructionTemplates InstructionTemplates::load_dir(const std::string& dir) {
  std::filesystem::path d(dir);
  InstructionTemplates t;
  t.rewrite = read_template(d, "rewrite_definitions.txt", true);
  t.write_snippets = read_template(d, "write_snippets.txt", true);
  t.specialize = read_template(d, "specialize.txt", true);
  t.classification = read_template(d, "classification.txt", true);
  t.version = std::string(detail::trim(read_template(d, "version.txt", false)));
  if (t.version.empty()) {
    t.version = "unversioned";
  }
  return t;
}

std::vector<std::string> find_placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{' || i + 1 >= text.size() || !detail::is_ident_start(text[i + 1])) {
      continue;
    }
    std::size_t j = i + 2;
    while (j < text.size() && detail::is_ident_char(text[j])) {
      ++j;
    }
    if (text.substr(j, 3) == "[i]") {
      j += 3;
    }
    if (j < text.size() && text[j] == '}') {
      out.emplace_back(text.substr(i, j + 1 - i));
      i = j;
    }
  }
  return out;
}

std::string render_rewrite_instruction(const InstructionTemplates& templates) {
  reject_placeholders(templates.rewrite, "rewrite template");
  return templates.rewrite;
}

std::string render_generic_snippet_instruction(const InstructionTemplates& templates) {
  reject_placeholders(templates.write_snippets, "write-snippets template");
  return templates.write_snippets;
}

std::string render_snippet_instruction(const InstructionTemplates& templates,
                                       std::string_view type_definition) {
  if (detail::trim(type_definition).empty()) {
    throw InvalidArgument("question type definition must be non-empty");
  }
  std::string head = render_generic_snippet_instruction(templates);
  std::size_t pos = templates.specialize.find(kTypeDefinition);
  if (pos == std::string::npos) {
    throw TemplateMissing("specialization template lacks " + std::string(kTypeDefinition));
  }
  std::string tail = templates.specialize;
  tail.replace(pos, kTypeDefinition.size(), type_definition);
  // Only the template text around the substitution is checked.
  reject_placeholders(std::string_view(tail).substr(0, pos), "specialization template");
  reject_placeholders(std::string_view(tail).substr(pos + type_definition.size()),
                      "specialization template");
  return head + tail;
}

std::string render_classification_prompt(const InstructionTemplates& templates,
                                         const QuestionTypeCatalog& catalog) {
  std::string out;
  bool expanded = false;
  std::string_view text = templates.classification;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string_view line = text.substr(pos, end - pos);
    if (line.find(kTypeName) != std::string_view::npos ||
        line.find(kTypeDefinitionI) != std::string_view::npos) {
      for (const auto& type : catalog.types()) {
        std::string row = replace_all(std::string(line), kTypeName, type.name);
        std::size_t at = row.find(kTypeDefinitionI);
        if (at != std::string::npos) {
          reject_placeholders(std::string_view(row).substr(0, at), "classification template");
          row.replace(at, kTypeDefinitionI.size(), type.definition);
        }
        out += row;
      }
      expanded = true;
    } else {
      reject_placeholders(line, "classification template");
      out += line;
    }
    pos = end;
  }
  if (!expanded) {
    throw TemplateMissing("classification template has no {type[i]} line");
  }
  return out;
}

}  // namespace promptfold
