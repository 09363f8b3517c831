#include "promptfold/dataset.hpp"

#include <algorithm>
#include <json.hpp>
#include <numeric>
#include <random>
#include <set>

#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

std::vector<QaRecord> parse_dataset(std::string_view jsonl) {
  std::vector<QaRecord> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(jsonl)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    auto where = "dataset line " + std::to_string(line_no);
    QaRecord r;
    try {
      auto doc = nlohmann::json::parse(line);
      r.id = doc.at("id").get<std::string>();
      r.question = doc.at("question").get<std::string>();
      r.scene = doc.value("scene", "");
      r.answer = doc.value("answer", "");
      if (doc.contains("type") && !doc["type"].is_null()) {
        r.type = doc["type"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (detail::trim(r.question).empty()) {
      throw ConfigError(where + ": empty question");
    }
    if (!ids.insert(r.id).second) {
      throw ConfigError(where + ": duplicate id '" + r.id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<QaRecord> load_dataset(const std::string& path) { return parse_dataset(detail::read_file(path)); }

std::vector<QaRecord> subsample(const std::vector<QaRecord>& records, std::size_t n, std::uint64_t seed) {
  if (n >= records.size()) {
    return records;
  }
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with an explicit draw so results do not depend on
  // the standard library's distribution implementation.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (records.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<QaRecord> out;
  for (auto i : idx) {
    out.push_back(records[i]);
  }
  return out;
}

}  // namespace promptfold
