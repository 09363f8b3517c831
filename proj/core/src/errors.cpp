#include "promptfold/errors.hpp"

namespace promptfold {

int exit_code_for(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::configuration:
      return 1;
    case ErrorCategory::backend:
      return 2;
    case ErrorCategory::validation:
      return 3;
  }
  return 1;
}

}  // namespace promptfold
