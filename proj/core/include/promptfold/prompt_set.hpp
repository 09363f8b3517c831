#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "promptfold/compression.hpp"

namespace promptfold {

inline constexpr int kPromptSetVersion = 1;

/// Versioned, checksummed JSON document of a compressed set.
std::string serialize_set(const CompressedPromptSet& set);

/// Throws CorruptCache on malformed JSON, unknown version, missing fields,
/// checksum mismatch or unparsable definitions. When `expected_tokenizer`
/// is given and differs from the recorded one, tokenizer_mismatch is set.
CompressedPromptSet deserialize_set(std::string_view text,
                                    const std::optional<std::string>& expected_tokenizer = std::nullopt);

/// Writes atomically (temporary file then rename).
void save_set(const CompressedPromptSet& set, const std::string& path);

/// Unreadable files raise CorruptCache as well.
CompressedPromptSet load_set(const std::string& path,
                             const std::optional<std::string>& expected_tokenizer = std::nullopt);

}  // namespace promptfold
