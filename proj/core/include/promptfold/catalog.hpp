#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace promptfold {

struct QuestionType {
  std::string name;
  /// Natural-language definition used for specialization and classification.
  std::string definition;

  bool operator==(const QuestionType&) const = default;
};

/// Ordered set of question types.
class QuestionTypeCatalog {
 public:
  /// Throws ConfigError when empty, or on empty or duplicate names or
  /// empty definitions.
  explicit QuestionTypeCatalog(std::vector<QuestionType> types);

  /// Parses `{ "types": [ { "name": str, "definition": str } ] }`.
  static QuestionTypeCatalog parse(std::string_view json_text);
  static QuestionTypeCatalog load(const std::string& path);

  const std::vector<QuestionType>& types() const noexcept { return types_; }
  std::size_t size() const noexcept { return types_.size(); }
  bool contains(std::string_view name) const noexcept;
  /// Throws UnknownType.
  const QuestionType& at(std::string_view name) const;
  std::vector<std::string> names() const;

  bool operator==(const QuestionTypeCatalog&) const = default;

 private:
  std::vector<QuestionType> types_;
};

}  // namespace promptfold
