#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptfold {

struct QaRecord {
  std::string id;
  std::string question;
  /// Scene fixture id standing in for the image.
  std::string scene;
  std::string answer;
  std::optional<std::string> type;

  bool operator==(const QaRecord&) const = default;
};

/// One `{ "id", "question", "scene", "answer", "type"? }` object per line.
/// Throws ConfigError on malformed lines, empty questions or duplicate ids.
std::vector<QaRecord> parse_dataset(std::string_view jsonl);
std::vector<QaRecord> load_dataset(const std::string& path);

/// `n` records drawn without replacement by a generator seeded with `seed`,
/// kept in their original order. Returns all records when n >= size.
std::vector<QaRecord> subsample(const std::vector<QaRecord>& records, std::size_t n, std::uint64_t seed);

}  // namespace promptfold
