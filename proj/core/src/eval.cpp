#include "promptfold/eval.hpp"

#include <cmath>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

bool exact_match(std::string_view predicted, std::string_view gold) {
  return detail::to_lower(detail::trim(predicted)) == detail::to_lower(detail::trim(gold));
}

double round1(double value) { return std::round(value * 10.0) / 10.0; }

double reduction_rate(double baseline_tokens, double compressed_tokens) {
  if (!(baseline_tokens > 0)) {
    throw InvalidArgument("reduction rate needs a positive baseline token count");
  }
  return round1((1.0 - compressed_tokens / baseline_tokens) * 100.0);
}

namespace taxonomy {

const std::vector<std::string_view>& labels() {
  static const std::vector<std::string_view> all = {correct,  coding_error,        not_executed,
                                                    cannot_answer, articles,       unnecessary_details,
                                                    paraphrasing,  no_object,      wrong_answer};
  return all;
}

bool is_heuristic(std::string_view label) {
  return label == articles || label == unnecessary_details || label == paraphrasing || label == no_object;
}

}  // namespace taxonomy

namespace {

// Lowercase words with punctuation removed.
std::vector<std::string> words_of(std::string_view text) {
  std::string cleaned;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    cleaned.push_back(std::ispunct(u) && c != '\'' ? ' ' : static_cast<char>(std::tolower(u)));
  }
  return detail::split_words(cleaned);
}

bool is_article(const std::string& w) { return w == "a" || w == "an" || w == "the"; }

std::vector<std::string> without_articles(std::vector<std::string> words) {
  std::erase_if(words, is_article);
  return words;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) {
    return false;
  }
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
      return true;
    }
  }
  return false;
}

// Small synonym groups for common VQA answers.
const std::vector<std::vector<std::string_view>>& synonym_groups() {
  static const std::vector<std::vector<std::string_view>> groups = {
      {"sofa", "couch"},          {"pillow", "cushion"},      {"car", "automobile"},
      {"bicycle", "bike"},        {"television", "tv"},       {"phone", "cellphone", "cell phone"},
      {"gray", "grey"},           {"man", "guy", "gentleman"}, {"woman", "lady"},
      {"kid", "child"},           {"cup", "mug"},             {"picture", "photo", "photograph"},
      {"trousers", "pants"},      {"jacket", "coat"},         {"street", "road"},
      {"puppy", "dog"},           {"kitten", "cat"},          {"indoors", "inside"},
      {"outdoors", "outside"},    {"yes", "yeah"},            {"0", "zero", "none"},
      {"1", "one"},               {"2", "two"},               {"3", "three"},
      {"4", "four"},              {"5", "five"}};
  return groups;
}

bool synonyms(const std::string& a, const std::string& b) {
  for (const auto& group : synonym_groups()) {
    bool has_a = false;
    bool has_b = false;
    for (auto w : group) {
      has_a = has_a || w == a;
      has_b = has_b || w == b;
    }
    if (has_a && has_b) {
      return true;
    }
  }
  return false;
}

std::string joined(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    out += (out.empty() ? "" : " ") + w;
  }
  return out;
}

bool find_came_back_empty(const std::vector<TraceEvent>& trace) {
  for (const auto& ev : trace) {
    if (ev.name == "find" && detail::trim(ev.result) == "[]") {
      return true;
    }
  }
  return false;
}

}  // namespace

std::string classify_error(const QaRecord& record, const ExecutionResult& result) {
  using namespace taxonomy;
  if (result.status == ExecStatus::ok && result.answer && exact_match(*result.answer, record.answer)) {
    return std::string(correct);
  }
  if (result.status == ExecStatus::coding_error || result.status == ExecStatus::timeout) {
    return std::string(coding_error);
  }
  if (result.status == ExecStatus::sandbox_unavailable || !result.answer) {
    return std::string(not_executed);
  }
  const std::string& answer = *result.answer;
  if (detail::to_lower(answer).find(detail::to_lower(kCannotAnswerSentinel)) != std::string::npos) {
    return std::string(cannot_answer);
  }
  auto pred = words_of(answer);
  auto gold = words_of(record.answer);
  auto pred_bare = without_articles(pred);
  auto gold_bare = without_articles(gold);
  if (!gold_bare.empty() && pred_bare == gold_bare) {
    return std::string(articles);
  }
  if (!gold_bare.empty() && pred_bare.size() > gold_bare.size() && contains_run(pred_bare, gold_bare)) {
    return std::string(unnecessary_details);
  }
  if (!gold_bare.empty() && synonyms(joined(pred_bare), joined(gold_bare))) {
    return std::string(paraphrasing);
  }
  if (find_came_back_empty(result.trace)) {
    return std::string(no_object);
  }
  return std::string(wrong_answer);
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), cells_(labels_.size() * labels_.size(), 0) {}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) {
      return i;
    }
  }
  throw InvalidArgument("label '" + std::string(label) + "' is not in the confusion matrix");
}

void ConfusionMatrix::add(std::string_view gold, std::string_view predicted) {
  ++cells_[index_of(gold) * labels_.size() + index_of(predicted)];
  ++total_;
}

std::size_t ConfusionMatrix::at(std::string_view gold, std::string_view predicted) const {
  return cells_[index_of(gold) * labels_.size() + index_of(predicted)];
}

std::size_t ConfusionMatrix::row_sum(std::string_view gold) const {
  std::size_t row = index_of(gold);
  std::size_t sum = 0;
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    sum += cells_[row * labels_.size() + j];
  }
  return sum;
}

std::size_t ConfusionMatrix::diagonal() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    sum += cells_[i * labels_.size() + i];
  }
  return sum;
}

double ConfusionMatrix::accuracy() const {
  return total_ == 0 ? 0.0 : round1(100.0 * static_cast<double>(diagonal()) / static_cast<double>(total_));
}

ConfusionMatrix confusion_matrix(const std::vector<std::optional<std::string>>& gold,
                                 const std::vector<std::string>& predicted, const std::vector<std::string>& labels) {
  if (gold.size() != predicted.size()) {
    throw InvalidArgument("gold and predicted type lists differ in length");
  }
  ConfusionMatrix m(labels);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i]) {
      throw MissingGoldTypes("record " + std::to_string(i) + " has no gold type");
    }
    m.add(*gold[i], predicted[i]);
  }
  return m;
}

RecordLog make_record_log(const QuestionOutcome& o) {
  RecordLog log;
  log.id = o.record.id;
  log.question = o.record.question;
  log.gold_answer = o.record.answer;
  log.gold_type = o.record.type;
  log.predicted_type = o.predicted_type;
  log.fallback = o.fallback;
  log.status = std::string(to_string(o.result.status));
  log.answer = o.result.answer;
  log.stage = o.result.stage;
  log.label = classify_error(o.record, o.result);
  log.correct = log.label == taxonomy::correct;
  log.budget = o.budget;
  log.output_tokens = o.output_tokens;
  log.llm_calls = o.llm_calls;
  log.program_sha256 = o.code.empty() ? std::string{} : sha256_hex(o.code);
  return log;
}

EvalReport aggregate_report(const std::vector<RecordLog>& logs, Mode mode, std::optional<std::uint64_t> seed,
                            const std::vector<std::string>& type_labels) {
  EvalReport r;
  r.mode = std::string(to_string(mode));
  r.seed = seed;
  r.n = logs.size();
  for (auto label : taxonomy::labels()) {
    r.errors[std::string(label)] = 0;
    if (taxonomy::is_heuristic(label)) {
      r.heuristic_labels.emplace_back(label);
    }
  }
  if (logs.empty()) {
    return r;
  }
  double n = static_cast<double>(logs.size());
  bool all_gold = true;
  for (const auto& log : logs) {
    r.correct += log.correct ? 1 : 0;
    r.fallbacks += log.fallback ? 1 : 0;
    ++r.errors[log.label];
    r.mean_input_tokens += static_cast<double>(log.budget.total);
    r.mean_output_tokens += static_cast<double>(log.output_tokens);
    r.mean_api_defs_tokens += static_cast<double>(log.budget.api_defs_tokens);
    r.mean_instruction_tokens += static_cast<double>(log.budget.instruction_tokens);
    r.mean_classification_tokens += static_cast<double>(log.budget.classification_tokens);
    r.mean_snippet_tokens += static_cast<double>(log.budget.snippet_tokens);
    r.mean_question_tokens += static_cast<double>(log.budget.question_tokens);
    all_gold = all_gold && log.gold_type.has_value() && !log.predicted_type.empty();
  }
  r.accuracy = 100.0 * static_cast<double>(r.correct) / n;
  for (double* m : {&r.mean_input_tokens, &r.mean_output_tokens, &r.mean_api_defs_tokens,
                    &r.mean_instruction_tokens, &r.mean_classification_tokens, &r.mean_snippet_tokens,
                    &r.mean_question_tokens}) {
    *m /= n;
  }
  if (mode == Mode::adaptive && all_gold && !type_labels.empty()) {
    std::vector<std::optional<std::string>> gold;
    std::vector<std::string> predicted;
    for (const auto& log : logs) {
      gold.push_back(log.gold_type);
      predicted.push_back(log.predicted_type);
    }
    r.confusion = confusion_matrix(gold, predicted, type_labels);
  }
  return r;
}

void attach_baseline(EvalReport& report, std::string name, double baseline_tokens) {
  report.baseline_name = std::move(name);
  report.baseline_tokens = baseline_tokens;
  report.reduction_rate = reduction_rate(baseline_tokens, report.mean_input_tokens);
}

EvalRun run_eval(const std::vector<QaRecord>& dataset, const PipelineContext& context, const EvalConfig& config,
                 const ExecutorFactory& make_executor) {
  if (dataset.empty()) {
    throw ConfigError("dataset is empty");
  }
  auto records = config.sample > 0 ? subsample(dataset, config.sample, config.sample_seed) : dataset;
  auto outcomes = run_pipeline(records, context, config.pipeline, make_executor, config.workers);

  EvalRun run;
  for (const auto& o : outcomes) {
    run.logs.push_back(make_record_log(o));
  }
  auto seed = config.pipeline.mode == Mode::random_type ? config.pipeline.seed : std::nullopt;
  run.report = aggregate_report(run.logs, config.pipeline.mode, seed, context.catalog->names());
  run.report.provenance = config.provenance;
  if (config.sample > 0) {
    run.report.provenance["sample"] = std::to_string(config.sample);
    run.report.provenance["sample_seed"] = std::to_string(config.sample_seed);
  }

  if (config.baseline_tokens) {
    attach_baseline(run.report, "fixed", *config.baseline_tokens);
  } else if (context.source != nullptr) {
    double sum = 0;
    for (const auto& rec : records) {
      sum += static_cast<double>(token_budget(*context.tokenizer, rec.question, context.source->api_definitions,
                                              context.source->snippets, context.instruction, {},
                                              BudgetMode::single_call, config.pipeline.aggregate.comment_prefix)
                                     .total);
    }
    attach_baseline(run.report, "no_compression", sum / static_cast<double>(records.size()));
  }
  return run;
}

}  // namespace promptfold
