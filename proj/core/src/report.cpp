#include "promptfold/report.hpp"

#include <cstdio>
#include <json.hpp>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

using ojson = nlohmann::ordered_json;

namespace {

ojson budget_json(const TokenBudget& b) {
  return {{"api_defs", b.api_defs_tokens},
          {"instruction", b.instruction_tokens},
          {"classification", b.classification_tokens},
          {"snippets", b.snippet_tokens},
          {"question", b.question_tokens},
          {"total", b.total},
          {"mode", to_string(b.mode)}};
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) {
    s.append(width - s.size(), ' ');
  }
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) {
    s.insert(0, width - s.size(), ' ');
  }
  return s;
}

}  // namespace

std::string record_log_line(const RecordLog& log) {
  ojson j;
  j["id"] = log.id;
  j["question"] = log.question;
  j["gold_answer"] = log.gold_answer;
  j["gold_type"] = log.gold_type ? ojson(*log.gold_type) : ojson(nullptr);
  j["predicted_type"] = log.predicted_type;
  j["fallback"] = log.fallback;
  j["status"] = log.status;
  j["answer"] = log.answer ? ojson(*log.answer) : ojson(nullptr);
  j["stage"] = log.stage;
  j["correct"] = log.correct;
  j["label"] = log.label;
  j["budget"] = budget_json(log.budget);
  j["output_tokens"] = log.output_tokens;
  j["llm_calls"] = log.llm_calls;
  j["program_sha256"] = log.program_sha256;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::vector<RecordLog> parse_record_log(std::string_view jsonl) {
  std::vector<RecordLog> out;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(jsonl)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    try {
      auto j = ojson::parse(line);
      RecordLog log;
      log.id = j.at("id");
      log.question = j.at("question");
      log.gold_answer = j.at("gold_answer");
      if (!j.at("gold_type").is_null()) {
        log.gold_type = j["gold_type"].get<std::string>();
      }
      log.predicted_type = j.at("predicted_type");
      log.fallback = j.at("fallback");
      log.status = j.at("status");
      if (!j.at("answer").is_null()) {
        log.answer = j["answer"].get<std::string>();
      }
      log.stage = j.at("stage");
      log.correct = j.at("correct");
      log.label = j.at("label");
      const auto& b = j.at("budget");
      log.budget = compose_budget(b.at("api_defs"), b.at("instruction"), b.at("classification"),
                                  b.at("snippets"), b.at("question"),
                                  b.at("mode") == "adaptive" ? BudgetMode::adaptive : BudgetMode::single_call);
      if (log.budget.total != b.at("total").get<std::size_t>()) {
        throw ConfigError("budget total does not match its parts");
      }
      log.output_tokens = j.at("output_tokens");
      log.llm_calls = j.at("llm_calls");
      log.program_sha256 = j.at("program_sha256");
      out.push_back(std::move(log));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("record log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string report_to_json(const EvalReport& r) {
  ojson j;
  j["mode"] = r.mode;
  j["seed"] = r.seed ? ojson(*r.seed) : ojson(nullptr);
  j["n"] = r.n;
  j["correct"] = r.correct;
  j["accuracy"] = r.accuracy;
  j["mean_input_tokens"] = r.mean_input_tokens;
  j["mean_output_tokens"] = r.mean_output_tokens;
  j["mean_budget"] = {{"api_defs", r.mean_api_defs_tokens},
                      {"instruction", r.mean_instruction_tokens},
                      {"classification", r.mean_classification_tokens},
                      {"snippets", r.mean_snippet_tokens},
                      {"question", r.mean_question_tokens}};
  j["baseline"] = r.baseline_tokens ? ojson{{"name", r.baseline_name}, {"tokens", *r.baseline_tokens}}
                                    : ojson(nullptr);
  j["reduction_rate"] = r.reduction_rate ? ojson(*r.reduction_rate) : ojson(nullptr);
  if (r.confusion) {
    const auto& m = *r.confusion;
    ojson rows = ojson::object();
    for (const auto& g : m.labels()) {
      ojson row = ojson::object();
      for (const auto& p : m.labels()) {
        row[p] = m.at(g, p);
      }
      rows[g] = row;
    }
    j["confusion"] = {{"labels", m.labels()}, {"matrix", rows}, {"accuracy", m.accuracy()}};
  } else {
    j["confusion"] = nullptr;
  }
  j["fallbacks"] = r.fallbacks;
  ojson errors = ojson::object();
  for (auto label : taxonomy::labels()) {
    auto it = r.errors.find(std::string(label));
    errors[std::string(label)] = it == r.errors.end() ? 0 : it->second;
  }
  j["errors"] = errors;
  j["heuristic_labels"] = r.heuristic_labels;
  ojson prov = ojson::object();
  for (const auto& [k, v] : r.provenance) {
    prov[k] = v;
  }
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& r) {
  std::string out;
  out += "mode               " + r.mode + (r.seed ? " (seed " + std::to_string(*r.seed) + ")" : "") + "\n";
  out += "records            " + std::to_string(r.n) + "\n";
  out += "accuracy           " + fmt("%.1f", r.accuracy) + "% (" + std::to_string(r.correct) + "/" +
         std::to_string(r.n) + ")\n";
  out += "mean input tokens  " + fmt("%.1f", r.mean_input_tokens) + "\n";
  out += "mean output tokens " + fmt("%.1f", r.mean_output_tokens) + "\n";
  if (r.reduction_rate) {
    out += "reduction rate     " + fmt("%.1f", *r.reduction_rate) + "% vs " + r.baseline_name + " (" +
           fmt("%.1f", *r.baseline_tokens) + " tokens)\n";
  }
  out += "\nbudget part        mean tokens\n";
  out += "  api defs         " + fmt("%.1f", r.mean_api_defs_tokens) + "\n";
  out += "  instruction      " + fmt("%.1f", r.mean_instruction_tokens) + "\n";
  out += "  classification   " + fmt("%.1f", r.mean_classification_tokens) + "\n";
  out += "  snippets         " + fmt("%.1f", r.mean_snippet_tokens) + "\n";
  out += "  question         " + fmt("%.1f", r.mean_question_tokens) + "\n";
  if (r.confusion) {
    const auto& m = *r.confusion;
    out += "\nconfusion (rows gold, columns predicted), accuracy " + fmt("%.1f", m.accuracy()) + "%\n";
    out += pad("", 8);
    for (const auto& p : m.labels()) {
      out += lpad(p, 8);
    }
    out += "\n";
    for (const auto& g : m.labels()) {
      out += pad(g, 8);
      for (const auto& p : m.labels()) {
        out += lpad(std::to_string(m.at(g, p)), 8);
      }
      out += "\n";
    }
  }
  out += "\nerror taxonomy (* heuristic)\n";
  for (auto label : taxonomy::labels()) {
    auto it = r.errors.find(std::string(label));
    std::size_t count = it == r.errors.end() ? 0 : it->second;
    out += "  " + pad(std::string(label) + (taxonomy::is_heuristic(label) ? " *" : ""), 40) +
           lpad(std::to_string(count), 5) + "\n";
  }
  if (r.fallbacks > 0) {
    out += "\nclassification fallbacks " + std::to_string(r.fallbacks) + "\n";
  }
  return out;
}

std::string ablation_table(const std::vector<EvalReport>& reports) {
  std::string out = pad("mode", 20) + lpad("accuracy", 10) + lpad("input", 10) + lpad("reduction", 11) + "\n";
  for (const auto& r : reports) {
    out += pad(r.mode, 20) + lpad(fmt("%.1f", r.accuracy), 10) + lpad(fmt("%.1f", r.mean_input_tokens), 10) +
           lpad(r.reduction_rate ? fmt("%.1f", *r.reduction_rate) + "%" : std::string("-"), 11) + "\n";
  }
  return out;
}

std::string budget_table(const std::vector<BudgetRow>& rows) {
  std::size_t width = 5;
  for (const auto& row : rows) {
    width = std::max(width, row.part.size());
  }
  std::size_t total = 0;
  std::string out = pad("part", width + 2) + lpad("tokens", 8) + "\n";
  for (const auto& row : rows) {
    out += pad(row.part, width + 2) + lpad(std::to_string(row.tokens), 8) + "\n";
    total += row.tokens;
  }
  out += pad("total", width + 2) + lpad(std::to_string(total), 8) + "\n";
  return out;
}

}  // namespace promptfold
