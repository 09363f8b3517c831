#pragma once

#include <string>
#include <string_view>

namespace promptfold {

/// Lowercase hex SHA-256 of the exact bytes of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace promptfold
