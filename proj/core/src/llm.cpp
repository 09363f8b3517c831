#include "promptfold/llm.hpp"

#include "promptfold/errors.hpp"

namespace promptfold {

void validate_request(const LlmRequest& request) {
  if (request.prompt.empty()) {
    throw InvalidArgument("LLM request has an empty prompt");
  }
  if (request.max_output_tokens <= 0) {
    throw InvalidArgument("max_output_tokens must be positive");
  }
  if (request.temperature < 0.0) {
    throw InvalidArgument("temperature must be non-negative");
  }
}

}  // namespace promptfold
