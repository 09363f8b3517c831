#include "promptfold/budget.hpp"

#include "promptfold/errors.hpp"

namespace promptfold {

std::string_view to_string(BudgetMode mode) noexcept {
  return mode == BudgetMode::adaptive ? "adaptive" : "single_call";
}

namespace {

std::size_t expected_total(const TokenBudget& b) noexcept {
  std::size_t question_copies = b.mode == BudgetMode::adaptive ? 2 : 1;
  return b.api_defs_tokens + b.instruction_tokens + b.classification_tokens + b.snippet_tokens +
         question_copies * b.question_tokens;
}

}  // namespace

TokenBudget compose_budget(std::size_t api_defs_tokens, std::size_t instruction_tokens,
                           std::size_t classification_tokens, std::size_t snippet_tokens,
                           std::size_t question_tokens, BudgetMode mode) {
  if (mode == BudgetMode::single_call && classification_tokens != 0) {
    throw InvalidArgument("single-call budgets carry no classification prompt");
  }
  TokenBudget b{api_defs_tokens, instruction_tokens, classification_tokens, snippet_tokens,
                question_tokens, 0, mode};
  b.total = expected_total(b);
  return b;
}

bool budget_identity_holds(const TokenBudget& budget) noexcept {
  if (budget.mode == BudgetMode::single_call && budget.classification_tokens != 0) {
    return false;
  }
  return budget.total == expected_total(budget);
}

}  // namespace promptfold
