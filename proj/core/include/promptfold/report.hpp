#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "promptfold/eval.hpp"

namespace promptfold {

/// One JSON line of the per-record log (no trailing newline).
std::string record_log_line(const RecordLog& log);
/// Inverse of record_log_line over a whole file. Throws ConfigError.
std::vector<RecordLog> parse_record_log(std::string_view jsonl);

/// Deterministic JSON document (two-space indent, trailing newline).
std::string report_to_json(const EvalReport& report);
/// Human-readable summary table.
std::string report_to_text(const EvalReport& report);
/// One row per report, for ablation sweeps.
std::string ablation_table(const std::vector<EvalReport>& reports);

struct BudgetRow {
  std::string part;
  std::size_t tokens = 0;
};

/// Two-column "part / tokens" table ending with a total row.
std::string budget_table(const std::vector<BudgetRow>& rows);

}  // namespace promptfold
