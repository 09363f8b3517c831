#include <gtest/gtest.h>

#include <random>

#include "promptfold/budget.hpp"
#include "promptfold/errors.hpp"
#include "promptfold/eval.hpp"
#include "promptfold/report.hpp"

using namespace promptfold;

TEST(Budget, PaperComponentTable) {
  auto b = compose_budget(541, 77, 141, 234, 0, BudgetMode::adaptive);
  EXPECT_EQ(b.total, 993u);
  EXPECT_EQ(compose_budget(541, 77, 141, 234, 7, BudgetMode::adaptive).total, 1007u);
  EXPECT_EQ(compose_budget(1971, 77, 0, 1386, 7, BudgetMode::single_call).total, 1971u + 77 + 1386 + 7);
  EXPECT_THROW(compose_budget(1, 1, 1, 1, 1, BudgetMode::single_call), InvalidArgument);
}

TEST(Budget, IdentityDetectsTampering) {
  auto b = compose_budget(10, 20, 30, 40, 5, BudgetMode::adaptive);
  EXPECT_TRUE(budget_identity_holds(b));
  b.total += 1;
  EXPECT_FALSE(budget_identity_holds(b));
}

TEST(ReductionRate, PaperFigures) {
  EXPECT_DOUBLE_EQ(reduction_rate(3434, 993), 71.1);
  EXPECT_DOUBLE_EQ(reduction_rate(1971, 541), 72.6);
  EXPECT_DOUBLE_EQ(reduction_rate(100, 100), 0.0);
  EXPECT_DOUBLE_EQ(reduction_rate(100, 150), -50.0);
  EXPECT_THROW(reduction_rate(0, 1), InvalidArgument);
  EXPECT_THROW(reduction_rate(-5, 1), InvalidArgument);
}

TEST(Round1, HalfAwayFromZero) {
  EXPECT_DOUBLE_EQ(round1(2.25), 2.3);
  EXPECT_DOUBLE_EQ(round1(-0.25), -0.3);
  EXPECT_DOUBLE_EQ(round1(58.139534), 58.1);
}

TEST(ExactMatch, CaseAndWhitespaceOnly) {
  EXPECT_TRUE(exact_match(" Yes\n", "yes"));
  EXPECT_FALSE(exact_match("a cat", "cat"));
  EXPECT_FALSE(exact_match("yes.", "yes"));
}

namespace {

ExecutionResult ok(std::string answer, std::vector<TraceEvent> trace = {}) {
  ExecutionResult r;
  r.status = ExecStatus::ok;
  r.answer = std::move(answer);
  r.trace = std::move(trace);
  return r;
}

ExecutionResult failed(ExecStatus s) {
  ExecutionResult r;
  r.status = s;
  return r;
}

std::string label(std::string gold, const ExecutionResult& r) {
  QaRecord rec{"id", "q", "s", std::move(gold), std::nullopt};
  return classify_error(rec, r);
}

}  // namespace

TEST(Taxonomy, EveryLabelIsReachable) {
  using namespace taxonomy;
  EXPECT_EQ(label("yes", ok("Yes")), correct);
  EXPECT_EQ(label("yes", failed(ExecStatus::coding_error)), coding_error);
  EXPECT_EQ(label("yes", failed(ExecStatus::timeout)), coding_error);
  EXPECT_EQ(label("yes", failed(ExecStatus::sandbox_unavailable)), not_executed);
  EXPECT_EQ(label("blue", ok("I cannot answer that from the image")), cannot_answer);
  EXPECT_EQ(label("the table", ok("table")), articles);
  EXPECT_EQ(label("cat", ok("a cat")), articles);
  EXPECT_EQ(label("blanket", ok("the blue blanket on the sofa")), unnecessary_details);
  EXPECT_EQ(label("pillow", ok("cushion")), paraphrasing);
  EXPECT_EQ(label("gray", ok("grey")), paraphrasing);
  EXPECT_EQ(label("yes", ok("no", {{"find", "[\"dog\"]", "[]"}})), no_object);
  EXPECT_EQ(label("red", ok("green")), wrong_answer);
  EXPECT_EQ(taxonomy::labels().size(), 9u);
}

TEST(Taxonomy, HeuristicLabels) {
  using namespace taxonomy;
  EXPECT_TRUE(is_heuristic(articles));
  EXPECT_TRUE(is_heuristic(unnecessary_details));
  EXPECT_TRUE(is_heuristic(paraphrasing));
  EXPECT_TRUE(is_heuristic(no_object));
  EXPECT_FALSE(is_heuristic(correct));
  EXPECT_FALSE(is_heuristic(coding_error));
  EXPECT_FALSE(is_heuristic(wrong_answer));
}

TEST(ConfusionMatrix, CountsAndAccuracy) {
  auto m = confusion_matrix({"a", "a", "b", "b"}, {"a", "b", "b", "b"}, {"a", "b"});
  EXPECT_EQ(m.at("a", "a"), 1u);
  EXPECT_EQ(m.at("a", "b"), 1u);
  EXPECT_EQ(m.at("b", "b"), 2u);
  EXPECT_EQ(m.row_sum("a"), 2u);
  EXPECT_EQ(m.diagonal(), 3u);
  EXPECT_DOUBLE_EQ(m.accuracy(), 75.0);
  EXPECT_THROW(m.add("c", "a"), InvalidArgument);
  EXPECT_THROW(confusion_matrix({std::nullopt}, {"a"}, {"a"}), MissingGoldTypes);
  EXPECT_DOUBLE_EQ(ConfusionMatrix({"a"}).accuracy(), 0.0);
}

namespace {

RecordLog log_for(std::string id, bool correct, std::string label, TokenBudget budget) {
  RecordLog l;
  l.id = std::move(id);
  l.question = "q";
  l.gold_answer = "yes";
  l.gold_type = "obj";
  l.predicted_type = correct ? "obj" : "attr";
  l.status = "ok";
  l.answer = correct ? "yes" : "no";
  l.correct = correct;
  l.label = std::move(label);
  l.budget = budget;
  l.output_tokens = 10;
  l.llm_calls = 2;
  l.program_sha256 = "ab";
  return l;
}

}  // namespace

TEST(Report, AggregateMeansAndErrors) {
  std::vector<RecordLog> logs = {
      log_for("a", true, "correct", compose_budget(100, 10, 20, 30, 4, BudgetMode::adaptive)),
      log_for("b", false, "wrong answer", compose_budget(100, 10, 20, 50, 6, BudgetMode::adaptive))};
  auto r = aggregate_report(logs, Mode::adaptive, std::nullopt, {"obj", "attr"});
  EXPECT_EQ(r.n, 2u);
  EXPECT_EQ(r.correct, 1u);
  EXPECT_DOUBLE_EQ(r.accuracy, 50.0);
  EXPECT_DOUBLE_EQ(r.mean_input_tokens, (168.0 + 192.0) / 2);
  EXPECT_DOUBLE_EQ(r.mean_snippet_tokens, 40.0);
  EXPECT_EQ(r.errors.at("wrong answer"), 1u);
  EXPECT_EQ(r.errors.at("coding error"), 0u);
  ASSERT_TRUE(r.confusion.has_value());
  EXPECT_DOUBLE_EQ(r.confusion->accuracy(), 50.0);
  EXPECT_FALSE(aggregate_report(logs, Mode::oracle_type, std::nullopt, {"obj", "attr"}).confusion.has_value());
  attach_baseline(r, "fixed", 360.0);
  EXPECT_DOUBLE_EQ(*r.reduction_rate, 50.0);
}

TEST(Report, RecordLogRoundTripAndBudgetCheck) {
  auto l = log_for("a", true, "correct", compose_budget(100, 10, 20, 30, 4, BudgetMode::adaptive));
  std::string line = record_log_line(l);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  auto back = parse_record_log(line + "\n" + record_log_line(l) + "\n");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], l);
  std::string broken = line;
  broken.replace(broken.find("\"total\":168"), 11, "\"total\":999");
  EXPECT_THROW(parse_record_log(broken), ConfigError);
}

TEST(Report, JsonIsDeterministic) {
  std::vector<RecordLog> logs = {
      log_for("a", true, "correct", compose_budget(100, 10, 20, 30, 4, BudgetMode::adaptive))};
  auto r = aggregate_report(logs, Mode::adaptive, std::nullopt, {"obj", "attr"});
  r.provenance = {{"z", "1"}, {"a", "2"}};
  std::string a = report_to_json(r);
  EXPECT_EQ(a, report_to_json(r));
  EXPECT_EQ(a.back(), '\n');
  EXPECT_NE(report_to_text(r).find("adaptive"), std::string::npos);
  EXPECT_NE(ablation_table({r, r}).find("adaptive"), std::string::npos);
}

TEST(Report, BudgetTable) {
  std::string t = budget_table({{"api defs", 541}, {"instruction", 77}, {"classification", 141}, {"snippets", 234}});
  EXPECT_NE(t.find("993"), std::string::npos);
  EXPECT_NE(t.find("api defs"), std::string::npos);
}
