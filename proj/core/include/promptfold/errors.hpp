#pragma once

#include <stdexcept>
#include <string>

namespace promptfold {

/// Coarse failure class. The CLI maps these onto its exit codes.
enum class ErrorCategory {
  configuration,  // bad config, missing fixtures or templates
  backend,        // LLM unreachable, transcript miss, context overflow
  validation,     // output rejected, corrupt cache, malformed input text
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define PROMPTFOLD_DECLARE_ERROR(Name, Category)                      \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                            \
        : Error(ErrorCategory::Category, std::string(#Name ": ") + what) {} \
  }

PROMPTFOLD_DECLARE_ERROR(ConfigError, configuration);
PROMPTFOLD_DECLARE_ERROR(TokenizerUnavailable, configuration);
PROMPTFOLD_DECLARE_ERROR(TemplateMissing, configuration);
PROMPTFOLD_DECLARE_ERROR(TranscriptWriteFailed, configuration);
PROMPTFOLD_DECLARE_ERROR(UnknownType, configuration);

PROMPTFOLD_DECLARE_ERROR(BackendUnreachable, backend);
PROMPTFOLD_DECLARE_ERROR(NoTranscriptMatch, backend);
PROMPTFOLD_DECLARE_ERROR(ContextOverflow, backend);

PROMPTFOLD_DECLARE_ERROR(MalformedDefinitions, validation);
PROMPTFOLD_DECLARE_ERROR(CompressionRejected, validation);
PROMPTFOLD_DECLARE_ERROR(CorruptCache, validation);
PROMPTFOLD_DECLARE_ERROR(CodeExtractionFailed, validation);
PROMPTFOLD_DECLARE_ERROR(MissingGoldTypes, validation);
PROMPTFOLD_DECLARE_ERROR(InvalidArgument, validation);

#undef PROMPTFOLD_DECLARE_ERROR

/// Exit code contract of the CLI: 0 ok, 1 configuration, 2 backend, 3 validation.
int exit_code_for(ErrorCategory category) noexcept;

}  // namespace promptfold
