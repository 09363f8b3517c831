#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptfold/compression.hpp"
#include "promptfold/dataset.hpp"
#include "promptfold/executor.hpp"
#include "promptfold/inference.hpp"

namespace promptfold {

enum class Mode { adaptive, oracle_type, random_type, fixed_type, simple_compression, no_compression };

std::string_view to_string(Mode mode) noexcept;
/// Throws ConfigError.
Mode parse_mode(std::string_view text);
/// All modes in ablation order.
const std::vector<Mode>& all_modes();

/// Read-only inputs shared by every worker.
struct PipelineContext {
  const CompressedPromptSet* set = nullptr;
  /// Needed by no_compression only.
  const PrepromptSource* source = nullptr;
  const QuestionTypeCatalog* catalog = nullptr;
  std::string classification_prompt;
  std::string instruction;
  LlmBackend* backend = nullptr;
  const Tokenizer* tokenizer = nullptr;
};

struct PipelineOptions {
  Mode mode = Mode::adaptive;
  /// Mandatory for random_type.
  std::optional<std::uint64_t> seed;
  /// Type used by fixed_type.
  std::string fixed_type;
  ClassifyOptions classify;
  GenerateOptions generate;
  AggregateOptions aggregate;
  int time_limit_ms = 5000;
  int memory_limit_mb = 512;
  /// Assemble prompts and budgets without any backend or executor call.
  bool dry_run = false;
};

/// Throws ConfigError when the options cannot work with the context
/// (missing seed, unknown fixed type, missing generic bundle, ...).
void validate_options(const PipelineContext& context, const PipelineOptions& options);

struct QuestionOutcome {
  QaRecord record;
  /// Type whose bundle was used; empty for simple_compression and
  /// no_compression, or when routing failed.
  std::string predicted_type;
  bool fallback = false;
  std::string preprompt;
  std::string code;
  ExecutionResult result;
  TokenBudget budget;
  int llm_calls = 0;
  std::size_t output_tokens = 0;
};

/// Type drawn for a record in random_type mode.
std::string random_type_for(const QaRecord& record, const QuestionTypeCatalog& catalog, std::uint64_t seed);

/// Routes, assembles, generates and executes one question. Stage failures
/// other than configuration errors are recorded as coding_error with the
/// stage name; configuration errors propagate.
QuestionOutcome answer_question(const QaRecord& record, const PipelineContext& context,
                                const PipelineOptions& options, Executor& executor);

using ExecutorFactory = std::function<std::shared_ptr<Executor>()>;

/// Processes records on `workers` threads, each with its own executor, and
/// returns outcomes in record order.
std::vector<QuestionOutcome> run_pipeline(const std::vector<QaRecord>& records, const PipelineContext& context,
                                          const PipelineOptions& options, const ExecutorFactory& make_executor,
                                          int workers = 1);

}  // namespace promptfold
