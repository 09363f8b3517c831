#include "promptfold/catalog.hpp"

#include <json.hpp>
#include <set>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

QuestionTypeCatalog::QuestionTypeCatalog(std::vector<QuestionType> types) : types_(std::move(types)) {
  if (types_.empty()) {
    throw ConfigError("question type catalog is empty");
  }
  std::set<std::string> seen;
  for (const auto& t : types_) {
    if (t.name.empty()) {
      throw ConfigError("question type with an empty name");
    }
    if (detail::trim(t.definition).empty()) {
      throw ConfigError("question type '" + t.name + "' has an empty definition");
    }
    if (!seen.insert(t.name).second) {
      throw ConfigError("duplicate question type '" + t.name + "'");
    }
  }
}

QuestionTypeCatalog QuestionTypeCatalog::parse(std::string_view json_text) {
  std::vector<QuestionType> types;
  try {
    auto doc = nlohmann::json::parse(json_text);
    for (const auto& t : doc.at("types")) {
      types.push_back({t.at("name").get<std::string>(), t.at("definition").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad catalog: ") + e.what());
  }
  return QuestionTypeCatalog(std::move(types));
}

QuestionTypeCatalog QuestionTypeCatalog::load(const std::string& path) {
  return parse(detail::read_file(path));
}

bool QuestionTypeCatalog::contains(std::string_view name) const noexcept {
  for (const auto& t : types_) {
    if (t.name == name) {
      return true;
    }
  }
  return false;
}

const QuestionType& QuestionTypeCatalog::at(std::string_view name) const {
  for (const auto& t : types_) {
    if (t.name == name) {
      return t;
    }
  }
  throw UnknownType("'" + std::string(name) + "' is not in the question type catalog");
}

std::vector<std::string> QuestionTypeCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& t : types_) {
    out.push_back(t.name);
  }
  return out;
}

}  // namespace promptfold
