#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace promptfold {

inline constexpr int kDefaultCodegenMaxTokens = 512;
inline constexpr int kDefaultClassifyMaxTokens = 16;

struct LlmRequest {
  std::string prompt;
  int max_output_tokens = kDefaultCodegenMaxTokens;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences;
  /// Free-form label of the pipeline stage ("classify", "compress_defs", ...).
  std::string tag;
};

struct LlmResponse {
  std::string text;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;
  std::string backend_id;
};

/// A single frozen text-to-text model. Implementations must be safe to call
/// from several threads at once. complete() either returns a full response
/// or throws; it never returns partial text.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
  virtual std::string id() const = 0;
};

/// Throws InvalidArgument when the request violates its invariants
/// (empty prompt, non-positive output budget, negative temperature).
void validate_request(const LlmRequest& request);

}  // namespace promptfold
