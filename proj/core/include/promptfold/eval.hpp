#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptfold/pipeline.hpp"

namespace promptfold {

/// Case-insensitive comparison after trimming. Articles are significant.
bool exact_match(std::string_view predicted, std::string_view gold);

/// (1 - compressed / baseline) * 100 rounded to one decimal.
/// Throws InvalidArgument when baseline is not positive.
double reduction_rate(double baseline_tokens, double compressed_tokens);

/// Rounds half away from zero to one decimal.
double round1(double value);

namespace taxonomy {
inline constexpr std::string_view correct = "correct";
inline constexpr std::string_view coding_error = "coding error";
inline constexpr std::string_view not_executed = "not executed";
inline constexpr std::string_view cannot_answer = "cannot answer to simple query";
inline constexpr std::string_view articles = "correct except for articles";
inline constexpr std::string_view unnecessary_details = "correct but with unnecessary details";
inline constexpr std::string_view paraphrasing = "correct by paraphrasing";
inline constexpr std::string_view no_object = "no object detected";
inline constexpr std::string_view wrong_answer = "wrong answer";

/// All labels, in check order.
const std::vector<std::string_view>& labels();
/// Labels produced by heuristics rather than exact rules.
bool is_heuristic(std::string_view label);
}  // namespace taxonomy

inline constexpr std::string_view kCannotAnswerSentinel = "I cannot answer";

/// One taxonomy label per record; the checks run in taxonomy::labels() order.
std::string classify_error(const QaRecord& record, const ExecutionResult& result);

/// Gold × predicted counts over a fixed label order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  /// Throws InvalidArgument for labels outside the matrix.
  void add(std::string_view gold, std::string_view predicted);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t at(std::string_view gold, std::string_view predicted) const;
  std::size_t row_sum(std::string_view gold) const;
  std::size_t total() const noexcept { return total_; }
  std::size_t diagonal() const;
  /// diagonal / total * 100, rounded to one decimal (0 when empty).
  double accuracy() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t index_of(std::string_view label) const;

  std::vector<std::string> labels_;
  std::vector<std::size_t> cells_;
  std::size_t total_ = 0;
};

/// Builds the matrix from (gold, predicted) pairs; any missing gold type
/// throws MissingGoldTypes.
ConfusionMatrix confusion_matrix(const std::vector<std::optional<std::string>>& gold,
                                 const std::vector<std::string>& predicted,
                                 const std::vector<std::string>& labels);

/// Everything logged per record; the report is a pure function of these.
struct RecordLog {
  std::string id;
  std::string question;
  std::string gold_answer;
  std::optional<std::string> gold_type;
  std::string predicted_type;
  bool fallback = false;
  std::string status;
  std::optional<std::string> answer;
  std::string stage;
  bool correct = false;
  std::string label;
  TokenBudget budget;
  std::size_t output_tokens = 0;
  int llm_calls = 0;
  std::string program_sha256;

  bool operator==(const RecordLog&) const = default;
};

RecordLog make_record_log(const QuestionOutcome& outcome);

struct EvalReport {
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0;
  double mean_input_tokens = 0;
  double mean_output_tokens = 0;
  /// Mean of each budget part.
  double mean_api_defs_tokens = 0;
  double mean_instruction_tokens = 0;
  double mean_classification_tokens = 0;
  double mean_snippet_tokens = 0;
  double mean_question_tokens = 0;
  std::string baseline_name;
  std::optional<double> baseline_tokens;
  std::optional<double> reduction_rate;
  /// Present when the mode classifies and every record has a gold type.
  std::optional<ConfusionMatrix> confusion;
  std::size_t fallbacks = 0;
  std::map<std::string, std::size_t> errors;
  std::vector<std::string> heuristic_labels;
  std::map<std::string, std::string> provenance;

  bool operator==(const EvalReport&) const = default;
};

/// Aggregates per-record logs. `type_labels` orders the confusion matrix.
EvalReport aggregate_report(const std::vector<RecordLog>& logs, Mode mode, std::optional<std::uint64_t> seed,
                            const std::vector<std::string>& type_labels);

/// Sets baseline and reduction rate from mean input tokens.
void attach_baseline(EvalReport& report, std::string name, double baseline_tokens);

struct EvalConfig {
  PipelineOptions pipeline;
  int workers = 1;
  /// Subsample size; 0 keeps every record.
  std::size_t sample = 0;
  std::uint64_t sample_seed = 0;
  /// Fixed baseline for the reduction rate; when absent the mean
  /// no_compression budget over the same records is used if available.
  std::optional<double> baseline_tokens;
  std::map<std::string, std::string> provenance;
};

struct EvalRun {
  EvalReport report;
  std::vector<RecordLog> logs;
};

/// Runs the pipeline over `dataset` and aggregates. Throws ConfigError on
/// an empty dataset.
EvalRun run_eval(const std::vector<QaRecord>& dataset, const PipelineContext& context, const EvalConfig& config,
                 const ExecutorFactory& make_executor);

}  // namespace promptfold
