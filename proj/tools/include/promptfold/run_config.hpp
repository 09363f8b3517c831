#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace promptfold {

struct BackendConfig {
  /// "replay" or "http".
  std::string kind = "replay";
  std::string dialect = "chat_completions";
  std::string base_url;
  std::string model;
  /// Environment variable holding the API key; the key itself is never stored.
  std::string key_env;
  std::size_t context_window = 0;
  int requests_per_minute = 0;
  int max_attempts = 4;
  int timeout_ms = 60000;
};

struct ExecutorConfig {
  /// "none", "stub" or "subprocess".
  std::string kind = "none";
  std::string stub;
  std::vector<std::string> command;
  bool inline_scenes = false;
};

struct Limits {
  int time_limit_ms = 5000;
  int memory_limit_mb = 512;
  int max_attempts = 3;
  int codegen_max_tokens = 512;
  int classify_max_tokens = 16;
  int compress_max_tokens = 2048;
};

/// Declarative run configuration. Relative paths are resolved against the
/// directory of the configuration file when loaded.
struct RunConfig {
  std::string tokenizer = "whitespace";
  std::string definitions;
  std::string snippets;
  std::string instruction;
  std::string templates;
  std::string catalog;
  std::string compressed_set;
  std::string dataset;
  std::string scene_dir;
  std::string transcript;
  BackendConfig backend;
  ExecutorConfig executor;
  std::string mode = "adaptive";
  std::optional<std::uint64_t> seed;
  std::string fixed_type;
  std::string fallback_type = "attr";
  std::string entry_point = "execute_command";
  std::string comment_prefix = "#";
  std::string timestamp;
  std::vector<std::string> required_api_names;
  int workers = 1;
  bool generic_bundle = true;
  Limits limits;
};

/// Throws ConfigError on unreadable files, unknown keys or invalid values.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

/// Mode-specific requirements (random mode needs a seed, fixed mode a type).
void validate_run_config(const RunConfig& config);

}  // namespace promptfold
