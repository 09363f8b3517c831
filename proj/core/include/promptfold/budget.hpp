#pragma once

#include <cstddef>
#include <string_view>

namespace promptfold {

/// How the question is billed in the input token total.
enum class BudgetMode {
  /// Classification call plus generation call: the question is sent twice
  /// and the classification prompt is billed.
  adaptive,
  /// One generation call: no classification prompt, question sent once.
  single_call,
};

std::string_view to_string(BudgetMode mode) noexcept;

struct TokenBudget {
  std::size_t api_defs_tokens = 0;
  std::size_t instruction_tokens = 0;
  std::size_t classification_tokens = 0;
  std::size_t snippet_tokens = 0;
  std::size_t question_tokens = 0;
  std::size_t total = 0;
  BudgetMode mode = BudgetMode::adaptive;

  bool operator==(const TokenBudget&) const = default;
};

/// Fills `total` from the parts. In single_call mode classification_tokens
/// must be zero; a non-zero value throws InvalidArgument.
TokenBudget compose_budget(std::size_t api_defs_tokens, std::size_t instruction_tokens,
                           std::size_t classification_tokens, std::size_t snippet_tokens,
                           std::size_t question_tokens, BudgetMode mode);

/// True when `budget.total` equals the component sum for its mode.
bool budget_identity_holds(const TokenBudget& budget) noexcept;

}  // namespace promptfold
